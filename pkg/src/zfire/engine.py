"""Event-driven simulation of the delayed forest-fire process on Z+.

Trees appear at vacant, non-burning sites at rate 1; a permanent ignition
source sits at site 0; a tree at x burning for the i-th time burns for
theta_{x,i} and can pass the fire to x+1 inside the influence window
[ignite + delta, ignite + theta + delta], clipped from below by the close
time of the previous window on the same pair (distinct arrows between a
pair of sites never cross).  The target catches fire at the first instant
inside the window at which it holds a non-burning tree.

The lattice grows lazily: a site is instantiated, with its growth clock
running from time 0, the first time an influence window touches it.  All
randomness is keyed by (site, purpose, occurrence) through RngPolicy, so a
run is a pure function of its ModelConfig, independent of event order and
of how far the lattice was materialized.

Frontier handling when one fire outruns the previous global maximum by
`site_sentinel` sites is selected by `frontier_mode`:

  exact      -- for zero burn time and constant positive delay only: decide
                the fire's entire future by one Bernoulli draw with the
                analytically computed continuation probability; if finite,
                sample the exact stopping site and reconstruct the burnt
                tail, so the run remains an exact sample of the process.
  heuristic  -- declare the fire infinite and (optionally) stop.
  truncate   -- stop following the fire and flag the run.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from . import analytics, rng
from .distributions import DeltaSpec, DistSpec
from .errors import ConfigError, NoInfiniteFire, ResourceLimit

FRONTIER_MODES = ("exact", "heuristic", "truncate")

# event kinds; the numeric order is the tie-break at equal times, and the
# site index comes next so simultaneous cascades resolve left to right
_EXTINGUISH = 0
_PLANT = 1
_IGNITE = 2
_ATTEMPT = 3

_VACANT = 0
_GREEN = 1
_BURNING = 2


@dataclass(frozen=True)
class ModelConfig:
    """Full parameterization of one run."""

    theta_spec: DistSpec
    delta_spec: DeltaSpec
    t_max: float
    seed: int
    site_sentinel: int = 1000
    max_fires: int | None = None
    frontier_mode: str = "heuristic"
    stop_on_infinite: bool = True
    site_window: int | None = None      # drop influence beyond this site
    site_cap: int = 2_000_000           # hard resource guard
    event_cap: int = 200_000_000        # hard resource guard
    stop_when_site_burnt: int | None = None
    record_attempts: bool = True

    def __post_init__(self):
        if isinstance(self.delta_spec, DistSpec):
            object.__setattr__(self, "delta_spec", DeltaSpec("homogeneous", base=self.delta_spec))
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        if self.site_sentinel < 2:
            raise ConfigError("site_sentinel must be at least 2")
        if self.max_fires is not None and self.max_fires < 1:
            raise ConfigError("max_fires must be positive when set")
        if self.frontier_mode not in FRONTIER_MODES:
            raise ConfigError(f"frontier_mode must be one of {FRONTIER_MODES}")
        if self.frontier_mode == "exact":
            if not self.theta_spec.is_zero:
                raise ConfigError("exact frontier classification requires an identically "
                                  "zero burn time")
            a = self.delta_spec.constant_value
            if a is None or a <= 0:
                raise ConfigError("exact frontier classification requires a constant "
                                  "positive spread delay")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError("seed must fit in 64 unsigned bits")
        if self.site_cap <= self.site_sentinel:
            raise ConfigError("site_cap must exceed site_sentinel")


def influence_window(ignite: float, theta: float, delta: float,
                     prev_close: float = 0.0) -> tuple[float, float] | None:
    """Window during which a burn starting at `ignite` can light its neighbor.

    Returns [max(ignite + delta, prev_close), ignite + theta + delta], or
    None when the clip by the previous window's close time empties it.
    """
    start = ignite + delta
    if prev_close > start:
        start = prev_close
    end = ignite + theta + delta
    return (start, end) if start <= end else None


def next_plant_time(site: int, after: float, policy: rng.RngPolicy,
                    occurrence: int) -> float:
    """Appearance time of the next tree at a site vacant since `after`."""
    return after + policy.exponential(site, rng.GROWTH, occurrence)


@dataclass(slots=True)
class Episode:
    """One tree's life at a site: planted, possibly ignited and burnt."""

    plant_time: float
    ignite_time: float | None = None
    extinguish_time: float | None = None
    fire_index: int | None = None


@dataclass(slots=True)
class FireRecord:
    """One fire, indexed by birth order at the origin."""

    index: int
    start_time: float
    rightmost: int = 0
    end_time: float | None = None
    classification: str = "finite"   # finite | infinite_exact | infinite_heuristic | truncated
    truncated_reason: str | None = None
    jump_count: int = 0              # stretch count of its frontier excursion, 0 if none
    ignitions: int = 0
    head_alive: bool = True

    @property
    def duration(self) -> float | None:
        if self.end_time is None:
            return None
        if math.isinf(self.end_time):
            return math.inf
        return self.end_time - self.start_time


@dataclass(frozen=True)
class MaximaRecord:
    """Successive global maximum i, with the decomposition of the excursion
    that created it into stretches of zero-wait spread separated by jumps.

    `jumps` is the stretch count; stretch boundaries are the strictly
    positive ignition delays at the frontier.  stretch_lengths sums to
    site - previous maximum (the first record counts from site 0).
    """

    index: int
    site: int
    fire_index: int
    f_first: float
    f_second: float | None
    stretch_lengths: tuple
    jumps: int
    completed: bool


@dataclass(slots=True)
class AttemptRecord:
    """One influence window and how it resolved."""

    source: int
    target: int
    fire_index: int
    window_start: float
    window_end: float
    delta: float
    outcome: str = "pending"  # pending | ignited | failed | empty
    ignited_at: float | None = None


@dataclass(frozen=True)
class FrontierTrial:
    """A stop/continue Bernoulli observation at a fresh, vacant frontier site."""

    site: int
    time: float
    window_length: float
    fire_index: int
    continued: bool


@dataclass(frozen=True)
class RunSummary:
    """Everything observed in one replication."""

    config: ModelConfig
    seed: int
    fires: tuple
    maxima: tuple
    timelines: dict
    attempts: tuple
    frontier_trials: tuple
    first_burn: dict
    kappa: int | None
    T: float | None
    detection_time: float | None
    global_max: int
    end_reason: str
    events: int
    truncated_by_sentinel: int
    truncated_by_window: int
    approximate_after: float | None


class _Site:
    __slots__ = ("phase", "plant_time", "next_plant", "burn_until",
                 "episodes", "growth_occ", "theta_occ", "delta_occ",
                 "ever_ignited")

    def __init__(self):
        self.phase = _VACANT
        self.plant_time = 0.0
        self.next_plant = 0.0
        self.burn_until = 0.0
        self.episodes = []
        self.growth_occ = 0
        self.theta_occ = 0
        self.delta_occ = 0
        self.ever_ignited = False


class Engine:
    """Single-run simulator.  Strictly sequential; create one per run."""

    def __init__(self, config: ModelConfig):
        self.cfg = config
        self.policy = rng.RngPolicy(config.seed)
        self.heap = []
        self.seq = 0
        self.now = 0.0
        self.sites: dict[int, _Site] = {}
        self.last_close: dict[int, float] = {}
        self.conditioned_plant: dict[int, float] = {}
        self.fires: list[FireRecord] = []
        self.maxima: list[dict] = []
        self.open_excursion: dict | None = None
        self.attempts: list[AttemptRecord] = []
        self.trials: list[FrontierTrial] = []
        self.first_burn: dict[int, float] = {}
        self.gmax = -1
        self.max_site = -1
        self.kappa: int | None = None
        self.T: float | None = None
        self.detection_time: float | None = None
        self.halted = False
        self.end_reason = "horizon"
        self.events = 0
        self.truncated_by_sentinel = 0
        self.truncated_by_window = 0
        self.approximate_after: float | None = None
        self.site_window = config.site_window
        self.live_heads = 0
        self._classify_occ = 0
        self._theta_is_zero = config.theta_spec.is_zero
        self._delta_const = config.delta_spec.constant_value
        self._materialize(0)

    # -- state plumbing ----------------------------------------------------

    def _push(self, time: float, kind: int, site: int, payload) -> None:
        self.seq += 1
        heapq.heappush(self.heap, (time, kind, site, self.seq, payload))

    def _materialize(self, site: int) -> _Site:
        s = _Site()
        self.sites[site] = s
        if site > self.max_site:
            self.max_site = site
        base = self.conditioned_plant.pop(site, 0.0)
        first = base + self.policy.exponential(site, rng.GROWTH, 0)
        s.growth_occ = 1
        if first <= self.now:
            s.phase = _GREEN
            s.plant_time = first
            s.episodes.append(Episode(first))
        else:
            s.phase = _VACANT
            s.next_plant = first
            self._push(first, _PLANT, site, None)
        return s

    # -- event handlers ----------------------------------------------------

    def _on_plant(self, site: int, t: float) -> None:
        s = self.sites[site]
        s.phase = _GREEN
        s.plant_time = t
        s.episodes.append(Episode(t))
        if site == 0:
            if self.cfg.max_fires is not None and len(self.fires) >= self.cfg.max_fires:
                # births beyond the quota are suppressed; the run ends once
                # every tracked fire has finished spreading
                if self.live_heads == 0:
                    self._halt("max_fires")
                return
            fire = FireRecord(index=len(self.fires) + 1, start_time=t)
            fire.end_time = t
            self.fires.append(fire)
            self.live_heads += 1
            self._ignite(0, t, fire, t, None)

    def _on_extinguish(self, site: int, t: float) -> None:
        s = self.sites[site]
        s.phase = _VACANT
        s.next_plant = t + self.policy.exponential(site, rng.GROWTH, s.growth_occ)
        s.growth_occ += 1
        self._push(s.next_plant, _PLANT, site, None)

    def _ignite(self, site: int, t: float, fire: FireRecord, window_start: float,
                attempt: AttemptRecord | None) -> None:
        s = self.sites[site]
        theta = self.cfg.theta_spec.sample(self.policy, site, rng.THETA, s.theta_occ)
        s.theta_occ += 1
        ep = s.episodes[-1]
        ep.ignite_time = t
        ep.extinguish_time = t + theta
        ep.fire_index = fire.index
        s.phase = _BURNING
        s.burn_until = t + theta
        s.ever_ignited = True
        self._push(t + theta, _EXTINGUISH, site, None)
        if attempt is not None:
            attempt.outcome = "ignited"
            attempt.ignited_at = t

        fire.rightmost = site
        fire.ignitions += 1
        if fire.end_time is None or t + theta > fire.end_time:
            fire.end_time = t + theta
        if site not in self.first_burn:
            self.first_burn[site] = t

        classified_away = False
        if site > self.gmax:
            exc = self.open_excursion
            if exc is None:
                exc = {"fire": fire, "prev_max": self.gmax, "stretches": [1],
                       "f_first": t, "site": site}
                self.open_excursion = exc
            else:
                if exc["fire"] is not fire:
                    # the window-ordering postulate makes this unreachable
                    raise RuntimeError("two fires beyond the global maximum at once")
                if t > window_start:
                    exc["stretches"].append(1)
                else:
                    exc["stretches"][-1] += 1
                exc["site"] = site
                exc["f_first"] = t
            self.gmax = site
            if site - exc["prev_max"] >= self.cfg.site_sentinel:
                classified_away = self._frontier_event(site, t, fire)

        if self.halted or classified_away:
            return
        if self.cfg.stop_when_site_burnt is not None and site == self.cfg.stop_when_site_burnt:
            self._halt("site_burnt")
            return
        self._schedule_attempt(site, t, theta, fire)

    def _schedule_attempt(self, source: int, t: float, theta: float,
                          fire: FireRecord) -> None:
        target = source + 1
        if self.site_window is not None and target > self.site_window:
            self._kill_head(fire, "truncated", "window")
            self.truncated_by_window += 1
            return
        if target >= self.cfg.site_cap:
            raise ResourceLimit(f"site cap {self.cfg.site_cap} reached")
        s = self.sites[source]
        delta = self.cfg.delta_spec.sample(self.policy, source, s.delta_occ)
        s.delta_occ += 1
        prev = self.last_close.get(target, 0.0)
        win = influence_window(t, theta, delta, prev)
        close = t + theta + delta
        if close > prev:
            self.last_close[target] = close
        rec = None
        if self.cfg.record_attempts:
            rec = AttemptRecord(source=source, target=target, fire_index=fire.index,
                                window_start=win[0] if win else close,
                                window_end=close, delta=delta)
            self.attempts.append(rec)
        if win is None:
            if rec is not None:
                rec.outcome = "empty"
            self._kill_head(fire, "finite", None)
            return
        self._push(win[0], _ATTEMPT, target, (fire, win[0], win[1], rec))

    def _on_attempt(self, target: int, tau: float, fire: FireRecord,
                    w_start: float, w_end: float, rec: AttemptRecord | None) -> None:
        s = self.sites.get(target)
        if s is None:
            s = self._materialize(target)
        if s.phase == _GREEN:
            self._ignite(target, tau, fire, w_start, rec)
            return
        if s.phase == _BURNING:
            if s.burn_until <= w_end:
                self._push(s.burn_until, _ATTEMPT, target, (fire, w_start, w_end, rec))
            else:
                if rec is not None:
                    rec.outcome = "failed"
                self._kill_head(fire, "finite", None)
            return
        # vacant; the pending plant decides the outcome
        p = s.next_plant
        continued = p <= w_end
        if not s.ever_ignited:
            self.trials.append(FrontierTrial(site=target, time=tau,
                                             window_length=w_end - tau,
                                             fire_index=fire.index,
                                             continued=continued))
        if continued:
            self._push(p, _IGNITE, target, (fire, w_start, rec))
        else:
            if rec is not None:
                rec.outcome = "failed"
            self._kill_head(fire, "finite", None)

    # -- frontier handling ---------------------------------------------------

    def _frontier_event(self, site: int, t: float, fire: FireRecord) -> bool:
        """Dispatch on frontier_mode; returns True when the head is consumed."""
        mode = self.cfg.frontier_mode
        if mode == "exact":
            self._classify_exact(site, t, fire)
            return True
        if mode == "heuristic":
            fire.classification = "infinite_heuristic"
            fire.end_time = math.inf
            if self.kappa is None:
                self.kappa = fire.index
                self.T = fire.start_time
                self.detection_time = t
            self._close_excursion(completed=False)
            self._consume_head(fire)
            if self.cfg.stop_on_infinite:
                self._halt("infinite")
            else:
                self.approximate_after = t
            return True
        fire.classification = "truncated"
        fire.truncated_reason = "sentinel"
        fire.end_time = None
        self.truncated_by_sentinel += 1
        self._close_excursion(completed=False)
        self._consume_head(fire)
        return True

    def _classify_exact(self, site: int, t: float, fire: FireRecord) -> None:
        a = self._delta_const
        if self.max_site > site:
            raise ConfigError("exact classification requires a fresh frontier")

        def next_u():
            u = self.policy.uniform(site, rng.CLASSIFY, self._classify_occ)
            self._classify_occ += 1
            return u

        offset = analytics.classify_frontier(t, a, next_u)
        if offset is None:
            fire.classification = "infinite_exact"
            fire.end_time = math.inf
            if self.kappa is None:
                self.kappa = fire.index
                self.T = fire.start_time
                self.detection_time = t
            self._close_excursion(completed=False)
            self._consume_head(fire)
            self._halt("infinite")
            return
        # finite: reconstruct the burnt tail site by site
        stop = site + offset
        for x in range(site + 1, stop + 1):
            burn_t = t + a * (x - site)
            s = _Site()
            self.sites[x] = s
            u = self.policy.uniform(x, rng.GROWTH, 0)
            plant = -math.log1p(-u * -math.expm1(-burn_t))
            s.episodes.append(Episode(plant, burn_t, burn_t, fire.index))
            s.ever_ignited = True
            s.theta_occ = 1
            s.next_plant = burn_t + self.policy.exponential(x, rng.GROWTH, 1)
            s.growth_occ = 2
            s.phase = _VACANT
            self._push(s.next_plant, _PLANT, x, None)
            self.first_burn[x] = burn_t
            self.last_close[x + 1] = burn_t + a
            if self.cfg.record_attempts:
                self.attempts.append(AttemptRecord(
                    source=x - 1, target=x, fire_index=fire.index,
                    window_start=burn_t, window_end=burn_t, delta=a,
                    outcome="ignited", ignited_at=burn_t))
            self.max_site = x
        self.conditioned_plant[stop + 1] = t + a * (stop + 1 - site)
        fire.rightmost = stop
        fire.ignitions += offset
        fire.end_time = t + a * offset
        fire.classification = "finite"
        if offset:
            exc = self.open_excursion
            exc["stretches"][-1] += offset
            exc["site"] = stop
            exc["f_first"] = t + a * offset
            self.gmax = stop
        self._close_excursion(completed=True)
        self._consume_head(fire)

    # -- lifecycle ----------------------------------------------------------

    def _consume_head(self, fire: FireRecord) -> None:
        if fire.head_alive:
            fire.head_alive = False
            self.live_heads -= 1
            if (not self.halted and self.cfg.max_fires is not None
                    and self.live_heads == 0
                    and len(self.fires) >= self.cfg.max_fires):
                self._halt("max_fires")

    def _kill_head(self, fire: FireRecord, classification: str, reason) -> None:
        fire.classification = classification
        fire.truncated_reason = reason
        if classification == "truncated":
            fire.end_time = None
        exc = self.open_excursion
        if exc is not None and exc["fire"] is fire:
            self._close_excursion(completed=(classification == "finite"))
        self._consume_head(fire)

    def _close_excursion(self, completed: bool) -> None:
        exc = self.open_excursion
        if exc is None:
            return
        exc["completed"] = completed
        exc["index"] = len(self.maxima) + 1
        self.maxima.append(exc)
        exc["fire"].jump_count = len(exc["stretches"])
        self.open_excursion = None

    def _halt(self, reason: str) -> None:
        self.halted = True
        self.end_reason = reason

    def run(self, until: float | None = None) -> None:
        """Process events up to the configured horizon, a stop condition, or
        the absolute time `until` when given (used by sheared continuation,
        whose observation window may extend past the original horizon)."""
        t_stop = self.cfg.t_max if until is None else until
        heap = self.heap
        cap = self.cfg.event_cap
        self.halted = False
        while heap and not self.halted:
            t = heap[0][0]
            if t > t_stop:
                self.end_reason = "horizon"
                break
            _, kind, site, _, payload = heapq.heappop(heap)
            self.now = t
            self.events += 1
            if self.events > cap:
                raise ResourceLimit(f"event cap {cap} reached")
            if kind == _ATTEMPT:
                fire, w_start, w_end, rec = payload
                if self.site_window is not None and site > self.site_window:
                    self._kill_head(fire, "truncated", "window")
                    self.truncated_by_window += 1
                    continue
                self._on_attempt(site, t, fire, w_start, w_end, rec)
            elif kind == _IGNITE:
                fire, w_start, rec = payload
                self._ignite(site, t, fire, w_start, rec)
            elif kind == _PLANT:
                self._on_plant(site, t)
            else:
                self._on_extinguish(site, t)

    def summary(self) -> RunSummary:
        # fires still spreading when the run ended have unknown final reach
        reason = "horizon" if self.end_reason == "horizon" else "halt"
        for f in self.fires:
            if f.head_alive and f.classification == "finite":
                f.classification = "truncated"
                f.truncated_reason = reason
                f.end_time = None
        exc = self.open_excursion
        if exc is not None:
            self._close_excursion(completed=False)

        maxima = []
        for rec in self.maxima:
            site = rec["site"]
            second = None
            eps = self.sites[site].episodes
            burns = [e.ignite_time for e in eps if e.ignite_time is not None]
            if len(burns) >= 2:
                second = sorted(burns)[1]
            maxima.append(MaximaRecord(
                index=rec["index"], site=site, fire_index=rec["fire"].index,
                f_first=rec["f_first"], f_second=second,
                stretch_lengths=tuple(rec["stretches"]),
                jumps=len(rec["stretches"]), completed=rec["completed"]))

        timelines = {site: list(s.episodes) for site, s in sorted(self.sites.items())
                     if s.episodes}
        return RunSummary(
            config=self.cfg, seed=self.cfg.seed,
            fires=tuple(self.fires), maxima=tuple(maxima), timelines=timelines,
            attempts=tuple(self.attempts), frontier_trials=tuple(self.trials),
            first_burn=dict(self.first_burn), kappa=self.kappa, T=self.T,
            detection_time=self.detection_time, global_max=self.gmax,
            end_reason=self.end_reason, events=self.events,
            truncated_by_sentinel=self.truncated_by_sentinel,
            truncated_by_window=self.truncated_by_window,
            approximate_after=self.approximate_after)


def simulate(config: ModelConfig) -> RunSummary:
    """Run one replication over [0, t_max] and return its summary."""
    eng = Engine(config)
    eng.run()
    return eng.summary()


@dataclass(frozen=True)
class ShearedTrace:
    """Timelines after the infinite fire, in the sheared frame t -> t + T + a x."""

    T: float
    a: float
    window_sites: int
    observe_for: float
    timelines: dict          # site -> list of (plant, ignite, extinguish) shifted
    origin_burns: tuple      # sheared ignition times at site 0, ascending
    cluster_sizes: tuple     # rightmost site of each post-shear fire, window-capped
    run: RunSummary

    def interburn_times(self) -> list:
        b = self.origin_burns
        out = [b[0]] if b else []
        out.extend(b[i] - b[i - 1] for i in range(1, len(b)))
        return out


def simulate_sheared(config: ModelConfig, window_sites: int,
                     observe_for: float) -> ShearedTrace:
    """Continue a run past its infinite fire and return sheared timelines.

    Requires zero burn time and constant positive delay.  The run proceeds
    until an exact infinite-fire classification at start time T; dynamics
    are then restricted to sites 0..window_sites (influence only ever flows
    rightward, so the restriction is exact) and observed for `observe_for`
    units of sheared time.
    """
    a = config.delta_spec.constant_value
    if not config.theta_spec.is_zero or a is None or a <= 0:
        raise ConfigError("sheared continuation needs zero burn time and constant "
                          "positive delay")
    if config.frontier_mode != "exact":
        config = ModelConfig(
            theta_spec=config.theta_spec, delta_spec=config.delta_spec,
            t_max=config.t_max, seed=config.seed, site_sentinel=config.site_sentinel,
            max_fires=config.max_fires, frontier_mode="exact",
            stop_on_infinite=True, site_cap=config.site_cap,
            event_cap=config.event_cap, record_attempts=config.record_attempts)
    eng = Engine(config)
    eng.run()
    if eng.end_reason != "infinite" or eng.kappa is None:
        raise NoInfiniteFire("the run ended without an exact infinite-fire "
                             "classification; extend t_max")
    T = eng.T
    fire = eng.fires[eng.kappa - 1]
    front = fire.rightmost  # trigger site; the front passes x at exactly T + a x
    X = window_sites
    for x in range(front + 1, X + 1):
        burn_t = T + a * x
        s = _Site()
        eng.sites[x] = s
        u = eng.policy.uniform(x, rng.GROWTH, 0)
        plant = -math.log1p(-u * -math.expm1(-burn_t))
        s.episodes.append(Episode(plant, burn_t, burn_t, fire.index))
        s.ever_ignited = True
        s.theta_occ = 1
        s.next_plant = burn_t + eng.policy.exponential(x, rng.GROWTH, 1)
        s.growth_occ = 2
        s.phase = _VACANT
        eng._push(s.next_plant, _PLANT, x, None)
        eng.first_burn[x] = burn_t
        eng.last_close[x + 1] = burn_t + a
        if config.record_attempts:
            eng.attempts.append(AttemptRecord(
                source=x - 1, target=x, fire_index=fire.index,
                window_start=burn_t, window_end=burn_t, delta=a,
                outcome="ignited", ignited_at=burn_t))
        eng.max_site = x
    if X > eng.gmax:
        eng.gmax = X
    eng.site_window = X
    eng.end_reason = "horizon"
    eng.run(until=T + a * X + observe_for)
    run = eng.summary()

    timelines = {}
    origin_burns = []
    for x in range(0, X + 1):
        shift = T + a * x
        shifted = []
        for ep in run.timelines.get(x, []):
            hi = ep.extinguish_time if ep.extinguish_time is not None else ep.plant_time
            if hi < shift or ep.plant_time > shift + observe_for:
                continue
            shifted.append((ep.plant_time - shift,
                            None if ep.ignite_time is None else ep.ignite_time - shift,
                            None if ep.extinguish_time is None else ep.extinguish_time - shift))
        timelines[x] = shifted
        if x == 0:
            origin_burns = sorted(t[1] for t in shifted
                                  if t[1] is not None and 0.0 < t[1] <= observe_for)
    clusters = []
    for f in run.fires:
        if f.index > fire.index and f.start_time > T:
            clusters.append(f.rightmost)
    return ShearedTrace(T=T, a=a, window_sites=X, observe_for=observe_for,
                        timelines=timelines, origin_burns=tuple(origin_burns),
                        cluster_sizes=tuple(clusters), run=run)
