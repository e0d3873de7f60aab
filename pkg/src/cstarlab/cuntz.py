"""Cuntz-semigroup arithmetic for concrete one-dimensional models.

Three layers:

* `ExtNat` -- the extended naturals {0, 1, 2, ..., oo}, the rank values of
  finite-dimensional blocks;
* `LscStep` -- lower-semicontinuous ExtNat-valued step functions on [0, 1]
  with exact rational breakpoints, modelling the semigroup of the interval
  algebra; addition is pointwise, and the order is pointwise <= (for 0/oo
  valued functions this is exactly containment of open supports);
* `CuNccwElement` -- pairs (f, v) subject to the boundary conditions
  f(0) = M0 v and f(1) = M1 v of a one-dimensional NCCW pullback, with the
  rank-bookkeeping convention oo * 0 = 0 in the matrix products.

`k1_trivial` decides triviality of K1 for such a pullback: it is
equivalent to surjectivity of M0 - M1 over the integers, read off the
Smith normal form.  `cu_jiang_su` builds elements of the two-sheet monoid
N_0 |_| (0, oo] (compact classes and soft classes with a value), with the
standard order in which a soft element never dominates the compact element
of the same value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .intlinalg import IntMatrix, smith_normal_form


class DimensionMismatchError(ValueError):
    """Component counts or matrix shapes do not line up."""


class ShapeMismatchError(ValueError):
    """The two boundary matrices must have equal shapes."""


class NotIncreasingError(ValueError):
    """A chain handed to the supremum was not increasing."""


# ---------------------------------------------------------------------------
# extended naturals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtNat:
    """A value in {0, 1, 2, ...} u {oo}; `None` encodes oo."""

    value: int | None = 0

    def __post_init__(self):
        if self.value is not None:
            if not isinstance(self.value, int) or isinstance(self.value, bool) or self.value < 0:
                raise ValueError(f"ExtNat wants a nonnegative int or None, got {self.value!r}")

    @classmethod
    def infinity(cls) -> "ExtNat":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __add__(self, other: "ExtNat") -> "ExtNat":
        other = as_extnat(other)
        if self.is_infinite or other.is_infinite:
            return EXT_INF
        return ExtNat(self.value + other.value)

    __radd__ = __add__

    def times(self, k: int) -> "ExtNat":
        """k * self for an integer k >= 0, with the convention oo * 0 = 0."""
        if k < 0:
            raise ValueError("multiplier must be nonnegative")
        if k == 0:
            return ExtNat(0)
        if self.is_infinite:
            return EXT_INF
        return ExtNat(k * self.value)

    def __le__(self, other: "ExtNat") -> bool:
        other = as_extnat(other)
        if other.is_infinite:
            return True
        if self.is_infinite:
            return False
        return self.value <= other.value

    def __lt__(self, other: "ExtNat") -> bool:
        other = as_extnat(other)
        return self <= other and self != other

    def __gt__(self, other: "ExtNat") -> bool:
        return as_extnat(other) < self

    def __ge__(self, other: "ExtNat") -> bool:
        return as_extnat(other) <= self

    def __str__(self) -> str:
        return "inf" if self.is_infinite else str(self.value)


EXT_INF = ExtNat(None)


def as_extnat(x: Union["ExtNat", int]) -> ExtNat:
    if isinstance(x, ExtNat):
        return x
    return ExtNat(x)


def _ext_max(a: ExtNat, b: ExtNat) -> ExtNat:
    return b if a <= b else a


# ---------------------------------------------------------------------------
# lower-semicontinuous step functions on [0, 1]
# ---------------------------------------------------------------------------

def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("breakpoints must be exact rationals, not floats")
    return Fraction(x)


@dataclass(frozen=True)
class LscStep:
    """An ExtNat-valued lsc step function on [0, 1] in canonical form.

    `breakpoints` are strictly increasing rationals in the open interval;
    `interval_values[i]` is the constant value on the i-th open gap,
    `breakpoint_values[i]` the value at the i-th breakpoint, and
    `left_value` / `right_value` the values at 0 and 1.  Construction
    merges redundant breakpoints (equal neighbouring interval values whose
    breakpoint value agrees) and then insists on lower semicontinuity:
    every point value is <= the neighbouring interval values.
    """

    breakpoints: tuple[Fraction, ...]
    interval_values: tuple[ExtNat, ...]
    breakpoint_values: tuple[ExtNat, ...]
    left_value: ExtNat
    right_value: ExtNat

    def __post_init__(self):
        bps = tuple(_as_fraction(b) for b in self.breakpoints)
        ivals = tuple(as_extnat(v) for v in self.interval_values)
        pvals = tuple(as_extnat(v) for v in self.breakpoint_values)
        left = as_extnat(self.left_value)
        right = as_extnat(self.right_value)
        if len(ivals) != len(bps) + 1:
            raise ValueError("need one interval value per gap")
        if len(pvals) != len(bps):
            raise ValueError("need one point value per breakpoint")
        if any(not (0 < b < 1) for b in bps):
            raise ValueError("breakpoints must lie strictly inside (0, 1)")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")

        # canonical form: drop breakpoints separating equal values
        cb: list[Fraction] = []
        ci: list[ExtNat] = [ivals[0]]
        cp: list[ExtNat] = []
        for b, pv, nxt in zip(bps, pvals, ivals[1:]):
            if ci[-1] == nxt == pv:
                continue
            cb.append(b)
            cp.append(pv)
            ci.append(nxt)

        for i, pv in enumerate(cp):
            if not (pv <= ci[i] and pv <= ci[i + 1]):
                raise ValueError(f"not lower semicontinuous at breakpoint {cb[i]}")
        if not left <= ci[0]:
            raise ValueError("not lower semicontinuous at 0")
        if not right <= ci[-1]:
            raise ValueError("not lower semicontinuous at 1")

        object.__setattr__(self, "breakpoints", tuple(cb))
        object.__setattr__(self, "interval_values", tuple(ci))
        object.__setattr__(self, "breakpoint_values", tuple(cp))
        object.__setattr__(self, "left_value", left)
        object.__setattr__(self, "right_value", right)

    @classmethod
    def constant(cls, value) -> "LscStep":
        v = as_extnat(value)
        return cls((), (v,), (), v, v)

    @classmethod
    def zero(cls) -> "LscStep":
        return cls.constant(0)

    @classmethod
    def indicator(cls, lo, hi, value=1) -> "LscStep":
        """`value` on the open interval (lo, hi), zero elsewhere."""
        lo, hi = _as_fraction(lo), _as_fraction(hi)
        if not (0 <= lo < hi <= 1):
            raise ValueError("need 0 <= lo < hi <= 1")
        v = as_extnat(value)
        zero = ExtNat(0)
        bps = tuple(b for b in (lo, hi) if 0 < b < 1)
        if not bps:
            return cls((), (v,), (), zero, zero)
        if len(bps) == 2:
            return cls(bps, (zero, v, zero), (zero, zero), zero, zero)
        if lo == 0:  # single interior breakpoint at hi
            return cls(bps, (v, zero), (zero,), zero, zero)
        return cls(bps, (zero, v), (zero,), zero, zero)

    def value_at(self, x) -> ExtNat:
        x = _as_fraction(x)
        if not 0 <= x <= 1:
            raise ValueError("the function lives on [0, 1]")
        if x == 0:
            return self.left_value
        if x == 1:
            return self.right_value
        lo = 0
        for i, b in enumerate(self.breakpoints):
            if x == b:
                return self.breakpoint_values[i]
            if x < b:
                return self.interval_values[i]
        return self.interval_values[-1]

    def at_zero(self) -> ExtNat:
        return self.left_value

    def at_one(self) -> ExtNat:
        return self.right_value


def _zip_regions(f: LscStep, g: LscStep):
    """Yield (kind, f_value, g_value) over the common refinement of [0, 1].

    kind is "point" for 0, 1 and every breakpoint of either function, and
    "interval" for the open gaps in between; midpoint evaluation is exact
    because gaps contain no breakpoints.
    """
    cuts = sorted(set(f.breakpoints) | set(g.breakpoints))
    yield "point", f.left_value, g.left_value
    prev = Fraction(0)
    for c in cuts + [Fraction(1)]:
        mid = (prev + c) / 2
        yield "interval", f.value_at(mid), g.value_at(mid)
        if c != 1:
            yield "point", f.value_at(c), g.value_at(c)
        prev = c
    yield "point", f.right_value, g.right_value


def _build_from_regions(cuts: Sequence[Fraction], left: ExtNat, right: ExtNat,
                        intervals: Sequence[ExtNat], points: Sequence[ExtNat]) -> LscStep:
    return LscStep(tuple(cuts), tuple(intervals), tuple(points), left, right)


def _pointwise(f: LscStep, g: LscStep, op) -> LscStep:
    cuts = sorted(set(f.breakpoints) | set(g.breakpoints))
    intervals: list[ExtNat] = []
    points: list[ExtNat] = []
    prev = Fraction(0)
    for c in cuts + [Fraction(1)]:
        mid = (prev + c) / 2
        intervals.append(op(f.value_at(mid), g.value_at(mid)))
        if c != 1:
            points.append(op(f.value_at(c), g.value_at(c)))
        prev = c
    left = op(f.left_value, g.left_value)
    right = op(f.right_value, g.right_value)
    return _build_from_regions(cuts, left, right, intervals, points)


def lsc_add(f: LscStep, g: LscStep) -> LscStep:
    """Pointwise sum over the merged breakpoint set, renormalised."""
    return _pointwise(f, g, lambda x, y: x + y)


def lsc_max(f: LscStep, g: LscStep) -> LscStep:
    return _pointwise(f, g, _ext_max)


def lsc_leq(f: LscStep, g: LscStep) -> bool:
    """Pointwise order: f <= g at every interval, breakpoint and endpoint."""
    return all(fv <= gv for _, fv, gv in _zip_regions(f, g))


def lsc_sup_chain(chain: Sequence[LscStep]) -> LscStep:
    """Supremum of a finite increasing chain (its pointwise max envelope)."""
    chain = list(chain)
    if not chain:
        raise NotIncreasingError("the chain must be nonempty")
    for a, b in zip(chain, chain[1:]):
        if not lsc_leq(a, b):
            raise NotIncreasingError("the chain is not increasing")
    out = chain[0]
    for f in chain[1:]:
        out = lsc_max(out, f)
    return out


# ---------------------------------------------------------------------------
# NCCW pullback elements
# ---------------------------------------------------------------------------

def _check_nonnegative(m: IntMatrix, name: str) -> None:
    if any(x < 0 for row in m.entries for x in row):
        raise ValueError(f"{name} must have nonnegative entries")


def ext_matvec(m: IntMatrix, v: Sequence[ExtNat]) -> tuple[ExtNat, ...]:
    """M v in ExtNat arithmetic with the rank convention oo * 0 = 0."""
    if m.cols != len(v):
        raise DimensionMismatchError(f"matrix has {m.cols} columns, vector has {len(v)}")
    vec = [as_extnat(x) for x in v]
    out = []
    for row in m.entries:
        acc = ExtNat(0)
        for k, x in zip(row, vec):
            acc = acc + x.times(k)
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class CuNccwElement:
    """An element (f, v) of the pullback model, boundary data included.

    Construction checks shapes and nonnegativity of the boundary matrices
    only; whether the boundary conditions actually hold is `nccw_check`'s
    job, so invalid candidates can be represented and rejected.
    """

    f: tuple[LscStep, ...]
    v: tuple[ExtNat, ...]
    m0: IntMatrix
    m1: IntMatrix

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(self.f))
        object.__setattr__(self, "v", tuple(as_extnat(x) for x in self.v))
        if self.m0.rows != self.m1.rows or self.m0.cols != self.m1.cols:
            raise ShapeMismatchError("boundary matrices must have equal shapes")
        if len(self.f) != self.m0.rows:
            raise DimensionMismatchError(
                f"{len(self.f)} function components vs {self.m0.rows} matrix rows")
        if len(self.v) != self.m0.cols:
            raise DimensionMismatchError(
                f"{len(self.v)} vector entries vs {self.m0.cols} matrix columns")
        _check_nonnegative(self.m0, "M0")
        _check_nonnegative(self.m1, "M1")


def nccw_check(e: CuNccwElement) -> bool:
    """True iff f(0) = M0 v and f(1) = M1 v hold component-wise."""
    at0 = tuple(comp.at_zero() for comp in e.f)
    at1 = tuple(comp.at_one() for comp in e.f)
    return at0 == ext_matvec(e.m0, e.v) and at1 == ext_matvec(e.m1, e.v)


def add_elements(e1: CuNccwElement, e2: CuNccwElement) -> CuNccwElement:
    """Component-wise sum; only defined over the same boundary data."""
    if e1.m0 != e2.m0 or e1.m1 != e2.m1:
        raise ShapeMismatchError("elements live over different pullbacks")
    return CuNccwElement(
        tuple(lsc_add(a, b) for a, b in zip(e1.f, e2.f)),
        tuple(a + b for a, b in zip(e1.v, e2.v)),
        e1.m0, e1.m1)


def dimension_drop_boundary_maps(p: int, q: int) -> tuple[IntMatrix, IntMatrix]:
    """Boundary matrices of the (p, q) dimension-drop interval.

    At 0 the fibre is the p-block amplified q times, at 1 the q-block
    amplified p times, so M0 = [q, 0] and M1 = [0, p] on the rank vector
    (v_p, v_q).
    """
    if p < 1 or q < 1:
        raise ValueError("block sizes must be >= 1")
    return IntMatrix.from_rows([[q, 0]]), IntMatrix.from_rows([[0, p]])


def dimension_drop_unit(p: int, q: int) -> CuNccwElement:
    """The unit's class: constant rank pq with block ranks (p, q)."""
    m0, m1 = dimension_drop_boundary_maps(p, q)
    return CuNccwElement((LscStep.constant(p * q),), (ExtNat(p), ExtNat(q)), m0, m1)


def k1_trivial(m0: IntMatrix, m1: IntMatrix) -> bool:
    """Whether the pullback has trivial K1: M0 - M1 surjective over Z.

    Surjectivity of an m x n integer matrix holds iff its Smith form has
    full row rank with all invariant factors equal to 1.
    """
    if (m0.rows, m0.cols) != (m1.rows, m1.cols):
        raise ShapeMismatchError("boundary matrices must have equal shapes")
    diff = m0 - m1
    snf = smith_normal_form(diff)
    return snf.rank == diff.rows and all(d == 1 for d in snf.invariant_factors())


LEBESGUE = "lebesgue"


def dim_function(f: LscStep, measure=LEBESGUE) -> Fraction:
    """Measure of the open support {f > 0}.

    `measure` is either the LEBESGUE marker or an iterable of
    (position, weight) atoms with exact rational data.  The support of an
    lsc function is open, so for Lebesgue measure only the open gaps with
    positive value contribute.
    """
    zero = ExtNat(0)
    if isinstance(measure, str):
        if measure != LEBESGUE:
            raise ValueError(f"unknown measure {measure!r}")
        cuts = [Fraction(0), *f.breakpoints, Fraction(1)]
        total = Fraction(0)
        for lo, hi, val in zip(cuts, cuts[1:], f.interval_values):
            if val > zero:
                total += hi - lo
        return total
    total = Fraction(0)
    for pos, weight in measure:
        if f.value_at(_as_fraction(pos)) > zero:
            total += _as_fraction(weight)
    return total


# ---------------------------------------------------------------------------
# the monoid N_0 |_| (0, oo]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CuJiangSu:
    """Compact classes N_0 and soft classes (0, oo] with their standard order.

    Addition lands in the soft sheet as soon as one summand is soft.  The
    order restricts to the usual ones on each sheet; across sheets, a soft
    value is dominated by the compact of the same size, while a nonzero
    compact k only sits below soft values strictly larger than k.
    """

    kind: str
    value: int | float | Fraction

    def __post_init__(self):
        if self.kind == "compact":
            if not isinstance(self.value, int) or self.value < 0:
                raise ValueError("compact classes carry an integer >= 0")
        elif self.kind == "soft":
            if not self.value > 0:
                raise ValueError("soft classes carry a value in (0, oo]")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    @classmethod
    def compact(cls, k: int) -> "CuJiangSu":
        return cls("compact", k)

    @classmethod
    def soft(cls, t) -> "CuJiangSu":
        return cls("soft", t)

    @property
    def is_compact(self) -> bool:
        return self.kind == "compact"

    def __add__(self, other: "CuJiangSu") -> "CuJiangSu":
        if self.is_compact and other.is_compact:
            return CuJiangSu.compact(self.value + other.value)
        return CuJiangSu.soft(self.value + other.value)

    def __le__(self, other: "CuJiangSu") -> bool:
        if self.is_compact and other.is_compact:
            return self.value <= other.value
        if not self.is_compact and other.is_compact:
            return self.value <= other.value
        if self.is_compact and not other.is_compact:
            return self.value == 0 or self.value < other.value
        return self.value <= other.value

    def __lt__(self, other: "CuJiangSu") -> bool:
        return self <= other and self != other

    def __str__(self) -> str:
        if self.is_compact:
            return f"[{self.value}]"
        return f"soft({'inf' if self.value == math.inf else self.value})"


def cu_jiang_su(kind: str, value) -> CuJiangSu:
    """Factory matching the two-sheet presentation: kind 'compact' or 'soft'."""
    return CuJiangSu(kind, value)
