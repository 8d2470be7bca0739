"""Declarative laws for burn times and spread delays.

A DistSpec names a nonnegative scalar law; a DeltaSpec is either one such
law applied at every site or a site-indexed family whose parameters decay
like c/x.  Sampling is routed through the keyed RngPolicy so that a value
for a given (site, occurrence) is reproducible regardless of when it is
asked for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import rng
from .errors import ConfigError

_KINDS = ("zero", "constant", "exponential", "bernoulli_scaled", "uniform")


@dataclass(frozen=True)
class DistSpec:
    """One nonnegative scalar law, site-independent.

    kinds:
      zero                       -- identically 0
      constant(a)                -- point mass at a >= 0
      exponential(rate)          -- mean 1/rate
      bernoulli_scaled(a, p)     -- a with probability p, else 0
      uniform(lo, hi)            -- uniform on [lo, hi]
    """

    kind: str
    a: float = 0.0
    p: float = 0.0
    rate: float = 0.0
    lo: float = 0.0
    hi: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "constant" and self.a < 0:
            raise ConfigError("constant value must be nonnegative")
        if self.kind == "exponential" and self.rate <= 0:
            raise ConfigError("exponential rate must be positive")
        if self.kind == "bernoulli_scaled" and not (self.a >= 0 and 0 <= self.p <= 1):
            raise ConfigError("bernoulli_scaled needs a >= 0 and p in [0,1]")
        if self.kind == "uniform" and not (0 <= self.lo <= self.hi):
            raise ConfigError("uniform needs 0 <= lo <= hi")
        # canonical form: a zero-width law is the zero law
        if self.kind == "constant" and self.a == 0.0:
            object.__setattr__(self, "kind", "zero")

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "uniform" and self.hi == 0.0)

    def sample(self, policy: rng.RngPolicy, site: int, purpose: int, occurrence: int) -> float:
        k = self.kind
        if k == "zero":
            return 0.0
        if k == "constant":
            return self.a
        u = policy.uniform(site, purpose, occurrence)
        if k == "exponential":
            return -math.log1p(-u) / self.rate
        if k == "bernoulli_scaled":
            return self.a if u < self.p else 0.0
        # uniform
        return self.lo + u * (self.hi - self.lo)

    def mean(self) -> float:
        k = self.kind
        if k == "zero":
            return 0.0
        if k == "constant":
            return self.a
        if k == "exponential":
            return 1.0 / self.rate
        if k == "bernoulli_scaled":
            return self.a * self.p
        return 0.5 * (self.lo + self.hi)

    def laplace_at_one(self) -> float:
        """E exp(-X); the frontier stop probability when X is the burn time."""
        k = self.kind
        if k == "zero":
            return 1.0
        if k == "constant":
            return math.exp(-self.a)
        if k == "exponential":
            return self.rate / (self.rate + 1.0)
        if k == "bernoulli_scaled":
            return (1.0 - self.p) + self.p * math.exp(-self.a)
        if self.hi == self.lo:
            return math.exp(-self.lo)
        return (math.exp(-self.lo) - math.exp(-self.hi)) / (self.hi - self.lo)

    def to_dict(self) -> dict:
        k = self.kind
        if k == "zero":
            return {"kind": "zero"}
        if k == "constant":
            return {"kind": "constant", "a": self.a}
        if k == "exponential":
            return {"kind": "exponential", "rate": self.rate}
        if k == "bernoulli_scaled":
            return {"kind": "bernoulli_scaled", "a": self.a, "p": self.p}
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}

    @staticmethod
    def from_dict(d: dict) -> "DistSpec":
        return DistSpec(**d)


def zero() -> DistSpec:
    return DistSpec("zero")


def constant(a: float) -> DistSpec:
    return DistSpec("constant", a=a)


def exponential(rate: float = 1.0) -> DistSpec:
    return DistSpec("exponential", rate=rate)


def bernoulli_scaled(a: float, p: float) -> DistSpec:
    return DistSpec("bernoulli_scaled", a=a, p=p)


def uniform(lo: float, hi: float) -> DistSpec:
    return DistSpec("uniform", lo=lo, hi=hi)


_FAMILIES = ("homogeneous", "deterministic_c_over_x", "bounded_c_over_x")


@dataclass(frozen=True)
class DeltaSpec:
    """Spread-delay law, possibly site-dependent.

    homogeneous:            one DistSpec at every site.
    deterministic_c_over_x: exactly c/x at site x >= 1 (c at site 0, where
                            c/x is undefined; only the large-x tail matters).
    bounded_c_over_x:       uniform on [0, hi(x)] with
                            hi(x) = min(2c/x, delta_cap/sqrt(2x)), so the
                            support bound times sqrt(x) vanishes and the mean
                            is (c + o(1))/x once the cap stops binding.
    """

    family: str
    base: DistSpec | None = None
    c: float = 0.0
    delta_cap: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigError(f"unknown delta family {self.family!r}")
        if self.family == "homogeneous":
            if self.base is None:
                raise ConfigError("homogeneous DeltaSpec needs a base DistSpec")
        else:
            if self.c < 0:
                raise ConfigError("c must be nonnegative")
            if self.family == "bounded_c_over_x" and self.delta_cap <= 0:
                raise ConfigError("delta_cap must be positive")

    @property
    def is_zero(self) -> bool:
        return self.family == "homogeneous" and self.base.is_zero

    @property
    def constant_value(self) -> float | None:
        """The constant a when the family is homogeneous constant, else None."""
        if self.family == "homogeneous" and self.base.kind == "constant":
            return self.base.a
        if self.is_zero:
            return 0.0
        return None

    def support_cap(self, site: int) -> float:
        """Upper end of the support at `site` for the bounded family."""
        if site == 0:
            return 2.0 * self.c
        return min(2.0 * self.c / site, self.delta_cap / math.sqrt(2.0 * site))

    def sample(self, policy: rng.RngPolicy, site: int, occurrence: int) -> float:
        f = self.family
        if f == "homogeneous":
            return self.base.sample(policy, site, rng.DELTA, occurrence)
        if f == "deterministic_c_over_x":
            return self.c if site == 0 else self.c / site
        u = policy.uniform(site, rng.DELTA, occurrence)
        return u * self.support_cap(site)

    def mean(self, site: int) -> float:
        f = self.family
        if f == "homogeneous":
            return self.base.mean()
        if f == "deterministic_c_over_x":
            return self.c if site == 0 else self.c / site
        return 0.5 * self.support_cap(site)

    def to_dict(self) -> dict:
        if self.family == "homogeneous":
            return {"family": "homogeneous", "base": self.base.to_dict()}
        d = {"family": self.family, "c": self.c}
        if self.family == "bounded_c_over_x":
            d["delta_cap"] = self.delta_cap
        return d

    @staticmethod
    def from_dict(d: dict) -> "DeltaSpec":
        d = dict(d)
        if d.get("family") == "homogeneous":
            d["base"] = DistSpec.from_dict(d["base"])
        return DeltaSpec(**d)


def homogeneous(base: DistSpec) -> DeltaSpec:
    return DeltaSpec("homogeneous", base=base)


def deterministic_c_over_x(c: float) -> DeltaSpec:
    return DeltaSpec("deterministic_c_over_x", c=c)


def bounded_c_over_x(c: float, delta_cap: float = 1.0) -> DeltaSpec:
    return DeltaSpec("bounded_c_over_x", c=c, delta_cap=delta_cap)
