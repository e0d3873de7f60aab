"""Simple random walk on the half-line {0, 1, 2, ...} with a barrier at 0.

Interior transitions go up with probability p and down with probability q,
p + q = 1.  At zero the walk either reflects (the next state is forced to
be 1) or is absorbed (it stays at 0 forever); interior transitions are the
same in both modes.  The walk is recurrent when p <= q and transient when
p > q.

Uniform-consumption contract (fixed so that batched and per-trajectory
simulation agree bitwise): a trajectory with L states consumes exactly L
uniforms from its stream -- u[0] selects the initial state by inverse CDF
over the finite support of the initial distribution, and u[k] drives step
k, with "up" exactly when u[k] < p.  Forced moves at the barrier still
consume their uniform.

First-step-analysis oracles (`hit_zero_probability`, `sup_distribution`)
solve the associated tridiagonal linear systems; truncation policy for the
infinite-state oracle is geometric growth of the cut-off K with a 1e-12
successive-difference convergence test.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.linalg import solve_banded

from .rng import stream

_PROB_TOL = 1e-12


class InvalidParamsError(ValueError):
    """Walk parameters violate their invariants."""


class UnsupportedBarrierError(ValueError):
    """The requested operation is not defined for this barrier mode."""


class Barrier(enum.Enum):
    REFLECTING = "reflecting"
    ABSORBING = "absorbing"


class WalkClass(enum.Enum):
    RECURRENT = "recurrent"
    TRANSIENT = "transient"


@dataclass(frozen=True)
class WalkParams:
    """Transition data (p up, q down, barrier mode) plus initial distribution.

    `initial` maps states to probabilities; it must have finite support,
    nonnegative weights, and sum to 1 within 1e-12.  The default starts
    at 0.
    """

    p: float
    q: float | None = None
    barrier: Barrier = Barrier.REFLECTING
    initial: tuple[tuple[int, float], ...] = ((0, 1.0),)

    def __post_init__(self):
        q = 1.0 - self.p if self.q is None else self.q
        object.__setattr__(self, "q", float(q))
        object.__setattr__(self, "p", float(self.p))
        if not (0.0 <= self.p <= 1.0) or not (0.0 <= self.q <= 1.0):
            raise InvalidParamsError(f"step probabilities must lie in [0, 1], got p={self.p}, q={self.q}")
        if abs(self.p + self.q - 1.0) > _PROB_TOL:
            raise InvalidParamsError(f"p + q must equal 1, got {self.p + self.q}")
        if not isinstance(self.barrier, Barrier):
            raise InvalidParamsError(f"barrier must be a Barrier, got {self.barrier!r}")
        if isinstance(self.initial, Mapping):
            pairs = tuple(sorted(self.initial.items()))
        else:
            pairs = tuple(sorted((int(s), float(w)) for s, w in self.initial))
        if not pairs:
            raise InvalidParamsError("initial distribution must have nonempty support")
        for state, weight in pairs:
            if state < 0:
                raise InvalidParamsError(f"states must be nonnegative, got {state}")
            if weight < 0:
                raise InvalidParamsError(f"initial weights must be nonnegative, got {weight}")
        if len({s for s, _ in pairs}) != len(pairs):
            raise InvalidParamsError("initial distribution lists a state twice")
        if abs(sum(w for _, w in pairs) - 1.0) > _PROB_TOL:
            raise InvalidParamsError("initial distribution must sum to 1 within 1e-12")
        object.__setattr__(self, "initial", pairs)

    @classmethod
    def point(cls, p: float, *, barrier: Barrier = Barrier.REFLECTING,
              start: int = 0, q: float | None = None) -> "WalkParams":
        return cls(p=p, q=q, barrier=barrier, initial=((start, 1.0),))


@dataclass(frozen=True)
class Trajectory:
    """A finite run Y_0, Y_1, ..., Y_N of the walk."""

    states: tuple[int, ...]

    def __post_init__(self):
        if not self.states:
            raise InvalidParamsError("a trajectory needs at least one state")
        if any(s < 0 for s in self.states):
            raise InvalidParamsError("states must be nonnegative")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def max_state(self) -> int:
        return max(self.states)

    def zero_visits(self) -> int:
        """Number of indices n >= 1 with Y_n = 0."""
        return sum(1 for s in self.states[1:] if s == 0)


def check_trajectory(traj: Trajectory, barrier: Barrier) -> None:
    """Raise if the state sequence is impossible under the given barrier."""
    for a, b in zip(traj.states, traj.states[1:]):
        if a == 0:
            if barrier is Barrier.REFLECTING and b != 1:
                raise InvalidParamsError("reflecting walk must step 0 -> 1")
            if barrier is Barrier.ABSORBING and b != 0:
                raise InvalidParamsError("absorbing walk must stay at 0")
        elif abs(a - b) != 1:
            raise InvalidParamsError(f"interior steps must move by one, got {a} -> {b}")


def _initial_state(params: WalkParams, u: float) -> int:
    acc = 0.0
    for state, weight in params.initial:
        acc += weight
        if u < acc:
            return state
    return params.initial[-1][0]


def sample_trajectory(params: WalkParams, length: int, seed: int, *,
                      trial: int = 0) -> Trajectory:
    """Simulate `length` states; fully determined by (params, length, seed, trial).

    `trial` selects the per-trial stream keyed by (seed, trial); batch
    helpers use the same keying, so trial t of a batch reproduces
    `sample_trajectory(..., trial=t)` exactly.
    """
    if not isinstance(length, int) or length < 1:
        raise InvalidParamsError(f"length must be an integer >= 1, got {length!r}")
    uniforms = stream(seed, trial).random(length)
    states = _states_from_uniforms(params, uniforms)
    return Trajectory(tuple(states))


def _states_from_uniforms(params: WalkParams, uniforms: np.ndarray) -> list[int]:
    """Reference simulator: one state per uniform, u[0] picks the start."""
    state = _initial_state(params, float(uniforms[0]))
    states = [state]
    reflecting = params.barrier is Barrier.REFLECTING
    p = params.p
    for u in uniforms[1:]:
        if state == 0:
            state = 1 if reflecting else 0
        elif u < p:
            state += 1
        else:
            state -= 1
        states.append(state)
    return states


def _hits_zero_from_uniforms(params: WalkParams, uniforms: np.ndarray) -> bool:
    """Whether the walk visits 0 at some step in [1, len(uniforms) - 1].

    Before its first visit to 0 the walk is free, so the event only needs
    the running minimum of the +-1 partial sums; this matches the stepwise
    simulator exactly (same uniforms, same decisions).
    """
    start = _initial_state(params, float(uniforms[0]))
    steps = np.where(uniforms[1:] < params.p, 1, -1)
    if start == 0:
        if params.barrier is Barrier.ABSORBING:
            return steps.size > 0
        if steps.size <= 1:
            return False
        # forced 0 -> 1 consumes the first step uniform
        return bool(np.min(np.cumsum(steps[1:])) <= -1)
    if steps.size == 0:
        return False
    return bool(np.min(np.cumsum(steps)) <= -start)


def batch_hits_zero(params: WalkParams, horizon: int, trials: int, seed: int) -> np.ndarray:
    """Per-trial indicator of visiting 0 within steps [1, horizon].

    Trial t draws from the stream keyed by (seed, t); the result is
    independent of any batching or parallel schedule.
    """
    if horizon < 1 or trials < 1:
        raise InvalidParamsError("horizon and trials must be >= 1")
    out = np.empty(trials, dtype=bool)
    for t in range(trials):
        uniforms = stream(seed, t).random(horizon + 1)
        out[t] = _hits_zero_from_uniforms(params, uniforms)
    return out


def batch_sup(params: WalkParams, trials: int, seed: int, *, cap: int,
              max_steps: int = 1 << 16, window: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Sample min(sup_n Y_n, cap + 1) for the absorbing walk, per trial.

    Each trial runs until absorption at 0 or until its running maximum
    exceeds `cap` (either resolves every event {sup <= k} for k <= cap).
    Returns (sups, resolved); unresolved trials ran out of `max_steps`.
    Trial streams and uniform consumption match `sample_trajectory`.
    """
    if params.barrier is not Barrier.ABSORBING:
        raise UnsupportedBarrierError("sup sampling is an absorbing-mode diagnostic")
    if cap < 0 or trials < 1:
        raise InvalidParamsError("cap must be >= 0 and trials >= 1")
    sups = np.zeros(trials, dtype=np.int64)
    states = np.zeros(trials, dtype=np.int64)
    active = np.arange(trials)
    drawn = 0

    # initial states from u[0]
    first = np.empty(trials)
    for t in range(trials):
        first[t] = stream(seed, t).random(1)[0]
    support = np.array([s for s, _ in params.initial])
    cdf = np.cumsum([w for _, w in params.initial])
    states[:] = support[np.minimum(np.searchsorted(cdf, first, side="right"), len(support) - 1)]
    sups[:] = states
    drawn = 1
    active = active[(states[active] != 0) & (sups[active] <= cap)]

    while active.size and drawn < max_steps:
        take = min(window, max_steps - drawn)
        block = np.empty((active.size, take))
        for row, t in enumerate(active):
            block[row] = stream(seed, int(t)).random(drawn + take)[drawn:]
        st = states[active].copy()
        mx = sups[active].copy()
        alive = np.ones(active.size, dtype=bool)
        for col in range(take):
            moving = alive
            step = np.where(block[:, col] < params.p, 1, -1)
            st[moving] += step[moving]
            mx[moving] = np.maximum(mx[moving], st[moving])
            alive = alive & (st != 0) & (mx <= cap)
        states[active] = st
        sups[active] = mx
        active = active[alive]
        drawn += take

    resolved = (states == 0) | (sups > cap)
    return np.minimum(sups, cap + 1), resolved


def classify_walk(params: WalkParams) -> WalkClass:
    """Recurrent iff p <= q; defined for the reflecting barrier only."""
    if params.barrier is not Barrier.REFLECTING:
        raise UnsupportedBarrierError("recurrence classification assumes the reflecting barrier")
    return WalkClass.RECURRENT if params.p <= params.q else WalkClass.TRANSIENT


def _truncated_hit_zero(p: float, q: float, i: int, cutoff: int) -> float:
    """Hitting probability of 0 from i for the walk killed at `cutoff`.

    First-step analysis: h_0 = 1, h_cutoff = 0 and
    h_j = p h_{j+1} + q h_{j-1} in between, solved as a tridiagonal system.
    """
    if i <= 0:
        return 1.0
    if i >= cutoff:
        return 0.0
    n = cutoff - 1  # unknowns h_1 .. h_{cutoff-1}
    ab = np.zeros((3, n))
    ab[0, 1:] = p       # superdiagonal
    ab[1, :] = -1.0     # diagonal
    ab[2, :-1] = q      # subdiagonal
    rhs = np.zeros(n)
    rhs[0] = -q  # moves the h_0 = 1 boundary term across
    h = solve_banded((1, 1), ab, rhs)
    return min(1.0, max(0.0, float(h[i - 1])))


def hit_zero_probability(params: WalkParams, start: int, *,
                         tol: float = 1e-12, max_cutoff: int = 1 << 24) -> float:
    """Probability that the walk started at `start` ever reaches 0.

    For p <= q the monotone limit of the truncated systems is 1 (the chain
    is recurrent), and that limit is returned directly.  For p > q the
    truncated solutions increase to the limit geometrically; the cutoff
    doubles until two successive values differ by less than `tol`.
    """
    if start < 0:
        raise InvalidParamsError("start state must be nonnegative")
    if start == 0 or params.p <= params.q:
        return 1.0
    cutoff = max(64, 4 * start)
    prev = _truncated_hit_zero(params.p, params.q, start, cutoff)
    while cutoff <= max_cutoff:
        cutoff *= 2
        cur = _truncated_hit_zero(params.p, params.q, start, cutoff)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    return prev  # monotone lower bound; only reachable for p barely above q


def sup_distribution(params: WalkParams, k: int) -> Fraction:
    """P(sup_n Y_n <= k) for the absorbing walk, solved exactly.

    First-step analysis on {0, ..., k+1} with absorption at 0 and at k+1:
    hitting k+1 is exactly the event sup > k.  All arithmetic is in
    Fractions (floats are converted exactly), so gambler's-ruin identities
    hold on the nose.
    """
    if params.barrier is not Barrier.ABSORBING:
        raise UnsupportedBarrierError("sup of a reflecting walk is a different quantity")
    if k < 0:
        raise InvalidParamsError("level k must be nonnegative")
    p, q = Fraction(params.p), Fraction(params.q)

    # g_j = P(absorbed at 0 before k+1 | start j) via a forward sweep
    # g becomes the map j -> value for 0 <= j <= k (zero above).
    g = [Fraction(0)] * (k + 1)
    g[0] = Fraction(1)
    if k >= 1:
        alpha = [Fraction(0)] * (k + 1)
        beta = [Fraction(0)] * (k + 1)
        alpha[1], beta[1] = q, p
        for j in range(2, k + 1):
            denom = 1 - q * beta[j - 1]
            alpha[j] = q * alpha[j - 1] / denom
            beta[j] = p / denom
        g[k] = alpha[k]  # boundary g_{k+1} = 0
        for j in range(k - 1, 0, -1):
            g[j] = alpha[j] + beta[j] * g[j + 1]

    total = Fraction(0)
    for state, weight in params.initial:
        if state <= k:
            total += Fraction(weight) * g[state]
    return total
