"""Random algebra descriptors driven by the walk, plus Monte-Carlo estimators.

A reflecting walk whose collapse points are drawn from one of the three
measure schemes determines, with probability one, the trace simplex of the
limit algebra: the one-point simplex's algebra when the walk is recurrent
(p <= q), and otherwise one of two Bauer simplices or the dense-boundary
simplex according to the scheme.  `classify_trace_space` is a lookup of
that almost-sure class; `sample_algebra` attaches finite-stage diagnostics
from an actual simulated tower.  With an absorbing barrier the trace
simplex is finite-dimensional with dimension sup_n Y_n whenever the walk is
absorbed, and `sample_algebra` reports the number of extreme traces
(sup + 1).

The headline estimator is a finite-horizon proxy: the fraction of walks
that come back to 0 within the horizon.  This underestimates the
almost-sure event (infinitely many returns), so every report carries its
horizon; estimates are monotone nondecreasing in the horizon for a fixed
seed because trial streams extend without rewriting their prefixes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .intlinalg import FGAbelianGroup
from .rng import mix64
from .simplex import MeasureScheme, SimplexTower, build_tower, covering_radius
from .walk import (
    Barrier,
    InvalidParamsError,
    Trajectory,
    UnsupportedBarrierError,
    WalkParams,
    batch_hits_zero,
    sample_trajectory,
)

#: lookahead (in tower levels) used when sampling covering radii
DIAGNOSTIC_WINDOW = 512

_WILSON_Z95 = 1.959963984540054


class Finiteness(enum.Enum):
    STABLY_FINITE = "stably_finite"
    PURELY_INFINITE = "purely_infinite"


class TraceSpaceKind(enum.Enum):
    JIANG_SU = "jiang_su"
    FINITE_DIM = "finite_dim"
    BAUER_ONE_OVER_N = "bauer_one_over_n"
    BAUER_CANTOR = "bauer_cantor"
    POULSEN = "poulsen"


@dataclass(frozen=True)
class TraceSpaceTag:
    """Which trace simplex a descriptor carries.

    For FINITE_DIM, `points` is the number of extreme traces, so the
    simplex dimension is points - 1; a walk with sup = 0 yields the
    one-point (zero-dimensional) simplex, points = 1.
    """

    kind: TraceSpaceKind
    points: int | None = None

    def __post_init__(self):
        if self.kind is TraceSpaceKind.FINITE_DIM:
            if self.points is None or self.points < 1:
                raise InvalidParamsError("finite-dimensional tags carry points >= 1")
        elif self.points is not None:
            raise InvalidParamsError(f"{self.kind.value} does not carry a point count")

    @classmethod
    def jiang_su(cls) -> "TraceSpaceTag":
        return cls(TraceSpaceKind.JIANG_SU)

    @classmethod
    def finite_dim(cls, points: int) -> "TraceSpaceTag":
        return cls(TraceSpaceKind.FINITE_DIM, points)

    def __str__(self) -> str:
        if self.kind is TraceSpaceKind.FINITE_DIM:
            return f"finite_dim({self.points})"
        return self.kind.value


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Elliott-style summary of a K-contractible sample.

    The K-theory tuple is frozen by K-contractibility: (Z, order flag, unit
    class, 0), the order flag recording the standard positive cone in the
    stably finite case.  Purely infinite descriptors carry no trace space.
    """

    unit_class: int
    finiteness: Finiteness
    trace_space: TraceSpaceTag | None

    def __post_init__(self):
        if self.unit_class < 1:
            raise InvalidParamsError("unit class must be >= 1")
        if (self.finiteness is Finiteness.PURELY_INFINITE) != (self.trace_space is None):
            raise InvalidParamsError("purely infinite iff no trace space")

    @property
    def k_theory(self) -> tuple[FGAbelianGroup, bool, int, FGAbelianGroup]:
        ordered = self.finiteness is Finiteness.STABLY_FINITE
        return (FGAbelianGroup.free(1), ordered, self.unit_class, FGAbelianGroup.zero())

    @property
    def is_strongly_k_contractible(self) -> bool:
        return self.finiteness is Finiteness.STABLY_FINITE and self.unit_class == 1


_TRANSIENT_TAGS = {
    MeasureScheme.BARYCENTER_POINT_MASS: TraceSpaceKind.BAUER_ONE_OVER_N,
    MeasureScheme.UNIFORM_VERTICES: TraceSpaceKind.BAUER_CANTOR,
    MeasureScheme.LEBESGUE_FACES: TraceSpaceKind.POULSEN,
}


def classify_trace_space(params: WalkParams, scheme: MeasureScheme) -> TraceSpaceTag:
    """Almost-sure trace-simplex class for the reflecting walk.

    This is a theorem-backed lookup, not a computation on a sample: the
    recurrent walk (p <= q) collapses traces to a point, the transient walk
    sends the dimension to infinity with boundary behaviour set by the
    collapse measure.
    """
    if params.barrier is not Barrier.REFLECTING:
        raise UnsupportedBarrierError("the classification lookup assumes the reflecting walk")
    if params.p <= params.q:
        return TraceSpaceTag.jiang_su()
    return TraceSpaceTag(_TRANSIENT_TAGS[scheme])


@dataclass
class SampleDiagnostics:
    """Finite-stage evidence attached to one sampled descriptor."""

    horizon: int
    zero_visits: int
    max_dimension: int
    censored: bool = False
    absorbed: bool | None = None
    absorption_time: int | None = None
    covering_radius_samples: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "zero_visits": self.zero_visits,
            "max_dimension": self.max_dimension,
            "censored": self.censored,
            "absorbed": self.absorbed,
            "absorption_time": self.absorption_time,
            "covering_radius_samples": {str(k): v for k, v in self.covering_radius_samples.items()},
        }


def _radius_samples(tower: SimplexTower) -> dict[int, float]:
    """Covering radii at the last levels of dimension 1 and 2.

    Pushdowns are taken over a bounded lookahead window so the diagnostic
    stays cheap on long towers; the window size is DIAGNOSTIC_WINDOW levels.
    """
    out: dict[int, float] = {}
    for target in (1, 2):
        for level in range(tower.top_level, -1, -1):
            if tower.dims[level] == target:
                truncated = tower.truncate(level + DIAGNOSTIC_WINDOW)
                out[target] = covering_radius(truncated, level)
                break
    return out


def sample_algebra(params: WalkParams, scheme: MeasureScheme, horizon: int,
                   seed: int) -> tuple[AlgebraDescriptor, SampleDiagnostics]:
    """Run the walk for `horizon` steps and report the sampled descriptor.

    Reflecting mode returns the almost-sure class with unit class 1;
    absorbing mode returns the finite-dimensional tag with sup + 1 extreme
    traces, flagged as censored (never an error) when the walk has not been
    absorbed within the horizon.  The walk draws from the stream keyed by
    (seed, 0) exactly as `sample_trajectory`; tower collapses draw from a
    sub-seed derived by mix64(seed, 1).
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise InvalidParamsError(f"horizon must be an integer >= 1, got {horizon!r}")
    traj = sample_trajectory(params, horizon + 1, seed)
    states = traj.states
    max_dim = max(states)
    zero_visits = traj.zero_visits()

    if params.barrier is Barrier.REFLECTING:
        tower_states = states
        descriptor = AlgebraDescriptor(
            unit_class=1,
            finiteness=Finiteness.STABLY_FINITE,
            trace_space=classify_trace_space(params, scheme),
        )
        diagnostics = SampleDiagnostics(horizon=horizon, zero_visits=zero_visits,
                                        max_dimension=max_dim)
    else:
        absorbed = 0 in states
        if absorbed:
            hit = states.index(0)
            tower_states = states[: hit + 1] if hit > 0 else states[:1]
            sup = max(states[: hit + 1])
            censored = False
            absorption_time = hit
        else:
            tower_states = states
            sup = max_dim
            censored = True
            absorption_time = None
        descriptor = AlgebraDescriptor(
            unit_class=1,
            finiteness=Finiteness.STABLY_FINITE,
            trace_space=TraceSpaceTag.finite_dim(sup + 1),
        )
        diagnostics = SampleDiagnostics(horizon=horizon, zero_visits=zero_visits,
                                        max_dimension=max_dim, censored=censored,
                                        absorbed=absorbed, absorption_time=absorption_time)

    if len(tower_states) > 1:
        tower = build_tower(Trajectory(tuple(tower_states)), scheme, mix64(seed, 1))
        diagnostics.covering_radius_samples = _radius_samples(tower)
    return descriptor, diagnostics


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z95) -> tuple[float, float]:
    """Wilson score interval; stable at proportions near 0 and 1."""
    if trials < 1:
        raise InvalidParamsError("trials must be >= 1")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    ci_low: float
    ci_high: float
    successes: int
    trials: int
    horizon: int

    @property
    def ci(self) -> tuple[float, float]:
        return (self.ci_low, self.ci_high)


def estimate_prob_jiang_su(params: WalkParams, trials: int, horizon: int,
                           seed: int) -> EstimateResult:
    """Finite-horizon proxy for the trace-collapsing event.

    Estimates the probability that the walk visits 0 at some step in
    [1, horizon]; this lower-bounds the almost-sure event driving the
    one-point trace simplex.  Trial t draws from the stream keyed by
    (seed, t), so the estimate is reproducible and monotone nondecreasing
    in the horizon for a fixed seed.
    """
    if not isinstance(trials, int) or trials < 1:
        raise InvalidParamsError(f"trials must be an integer >= 1, got {trials!r}")
    if not isinstance(horizon, int) or horizon < 1:
        raise InvalidParamsError(f"horizon must be an integer >= 1, got {horizon!r}")
    hits = batch_hits_zero(params, horizon, trials, seed)
    successes = int(hits.sum())
    lo, hi = wilson_interval(successes, trials)
    return EstimateResult(successes / trials, lo, hi, successes, trials, horizon)


def classify_k_contractible(finiteness: Finiteness, k: int) -> str:
    """Model algebra label for a K-contractible sample with unit class k."""
    if k < 1:
        raise InvalidParamsError("unit class must be >= 1")
    if finiteness is Finiteness.PURELY_INFINITE:
        return "O_infinity" if k == 1 else f"M_{k}(O_infinity)"
    return "lim Z_{p,q}" if k == 1 else f"lim M_{k}(Z_{{p,q}})"


def params_to_dict(params: WalkParams) -> dict:
    return {
        "p": params.p,
        "q": params.q,
        "barrier": params.barrier.value,
        "initial": [[s, w] for s, w in params.initial],
    }


def report_record(params: WalkParams, scheme: MeasureScheme, result: EstimateResult,
                  diagnostics: SampleDiagnostics | None = None) -> dict:
    """One JSON-lines record: the estimator output plus its provenance."""
    return {
        "params": params_to_dict(params),
        "scheme": scheme.value,
        "horizon": result.horizon,
        "trials": result.trials,
        "estimate": result.estimate,
        "ci": [result.ci_low, result.ci_high],
        "diagnostics": diagnostics.to_dict() if diagnostics else None,
    }
