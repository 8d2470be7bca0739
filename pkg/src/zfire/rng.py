"""Counter-based random number streams keyed by (site, purpose, occurrence).

Every random quantity consumed by a simulation run is addressed by a key
rather than drawn from a shared sequential stream.  The sample for a given
key is a pure function of the master seed and the key, so it does not depend
on event-processing order, on how far the lattice happened to grow, or on
which worker process evaluated it.  This is what makes runs bit-reproducible
and ensemble aggregation order-independent.

The generator is the splitmix64 finalizer applied to a chain of the key
fields.  It is cheap enough to call once per event in pure Python and has
good equidistribution for Monte Carlo work at this scale.
"""

from __future__ import annotations

import math

import numpy as np

_M64 = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15
_K_PURPOSE = 0xC2B2AE3D27D4EB4F
_K_OCC = 0x165667B19E3779F9

# stream purposes
GROWTH = 1    # tree appearance clocks (rate-1 exponential)
THETA = 2     # burn times
DELTA = 3     # spread delays
CLASSIFY = 4  # frontier classification uniforms
REPLICATE = 5 # per-replication seed derivation


def _mix(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _M64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _M64
    return z ^ (z >> 31)


def key_bits(master: int, site: int, purpose: int, occurrence: int) -> int:
    """64 pseudorandom bits for one (site, purpose, occurrence) key."""
    h = _mix(master & _M64 ^ (_GOLD * (site + 1) & _M64))
    h = _mix(h ^ (_K_PURPOSE * (purpose + 1) & _M64))
    return _mix(h ^ (_K_OCC * (occurrence + 1) & _M64))


class RngPolicy:
    """Keyed sampling policy for one master seed.

    uniform() returns a float strictly inside (0, 1); exponential() is a
    unit-rate exponential derived from the same key.  Occurrence indices are
    managed by the caller (the engine keeps per-site counters).
    """

    __slots__ = ("master_seed",)

    def __init__(self, master_seed: int):
        if not (0 <= master_seed <= _M64):
            raise ValueError("master seed must fit in 64 unsigned bits")
        self.master_seed = master_seed

    def uniform(self, site: int, purpose: int, occurrence: int) -> float:
        bits = key_bits(self.master_seed, site, purpose, occurrence)
        # center the 53-bit mantissa so 0 and 1 are never returned
        return ((bits >> 11) + 0.5) * 1.1102230246299714e-16  # 2**-53

    def exponential(self, site: int, purpose: int, occurrence: int) -> float:
        u = self.uniform(site, purpose, occurrence)
        return -math.log1p(-u)

    def replicate_seed(self, index: int) -> int:
        """Derived master seed for replication `index` of an ensemble."""
        return key_bits(self.master_seed, index, REPLICATE, 0)


def uniform_array(master: int, site: int, purpose: int, n: int) -> np.ndarray:
    """Vectorized uniforms for occurrences 0..n-1 of one stream.

    Bit-identical to calling RngPolicy.uniform in a loop; used by tests that
    need large samples from the generator.
    """
    with np.errstate(over="ignore"):
        occ = np.arange(1, n + 1, dtype=np.uint64)
        h = np.uint64(_mix(master & _M64 ^ (_GOLD * (site + 1) & _M64)))
        h = _mix_np(h ^ np.uint64(_K_PURPOSE * (purpose + 1) & _M64))
        h = _mix_np(h ^ np.uint64(_K_OCC) * occ)
        out = ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 1.1102230246299714e-16
    return out


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))
