"""Constrained six-term exact-sequence solver over f.g. abelian groups.

The cyclic sequence is laid out as

    K0(J) --iota0--> K0(A) --pi0--> K0(A/J)
      ^                                |
    index                             exp
      |                                v
    K1(A/J) <--pi1-- K1(A) <--iota1-- K1(J)

with the two K-groups of exactly one corner (ideal, algebra or quotient)
unknown.  Connecting maps are integer matrices and are only meaningful
between *known free* groups, so each unknown slot X sits in a five-term
window  V --a--> W --> X --> Y --d--> Z  where a and d are data.  Exactness
forces a short exact sequence 0 -> coker(a) -> X -> ker(d) -> 0, and since
ker(d) is a subgroup of a free group it is free and the extension splits.
Whenever one of the two constraints is not available (a nonzero flanking
group whose adjacent map cannot be expressed over free bases), the solver
answers `UNDETERMINED` rather than guessing an extension.

Orientation conventions (fixed once, used consistently):

* the generator of K1 of the circle algebra is the class of the degree-one
  unitary z, and the generator of K0 of the compacts is the class of a
  rank-one projection;
* with these generators the boundary map sends the shift's symbol class to
  [1 - v*v] - [1 - vv*] = -1 (see `toeplitz_index_of_shift`);
* for the dimension-drop interval with fibre sizes (p, q), the exponential
  map out of K0 of the two matrix-block endpoints is the 1 x 2 matrix
  [q, -p] in the rank-one generators of the blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intlinalg import (
    ZERO_GROUP,
    Z,
    FGAbelianGroup,
    IntMatrix,
    cokernel,
    kernel_rank,
    rank,
    smith_normal_form,
)

SLOT_NAMES = ("k0_ideal", "k0_algebra", "k0_quotient",
              "k1_ideal", "k1_algebra", "k1_quotient")
MAP_NAMES = ("iota0", "pi0", "exp_map", "iota1", "pi1", "index_map")

_CORNER_PAIRS = {
    "ideal": ("k0_ideal", "k1_ideal"),
    "algebra": ("k0_algebra", "k1_algebra"),
    "quotient": ("k0_quotient", "k1_quotient"),
}


class InconsistentDataError(ValueError):
    """The known groups and maps cannot sit in any exact six-term sequence."""


class _Undetermined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDETERMINED"

    def __bool__(self):
        return False


UNDETERMINED = _Undetermined()


@dataclass(frozen=True)
class SixTermProblem:
    """Slots are FGAbelianGroup or None (= unknown); maps are IntMatrix or None.

    Map i runs from slot i to slot (i+1) mod 6 in the SLOT_NAMES ordering,
    i.e. iota0: K0(J)->K0(A), pi0: K0(A)->K0(A/J), exp_map: K0(A/J)->K1(J),
    iota1: K1(J)->K1(A), pi1: K1(A)->K1(A/J), index_map: K1(A/J)->K0(J).
    A map may only be supplied when both of its endpoints are known and free.
    """

    k0_ideal: FGAbelianGroup | None = None
    k0_algebra: FGAbelianGroup | None = None
    k0_quotient: FGAbelianGroup | None = None
    k1_ideal: FGAbelianGroup | None = None
    k1_algebra: FGAbelianGroup | None = None
    k1_quotient: FGAbelianGroup | None = None
    iota0: IntMatrix | None = None
    pi0: IntMatrix | None = None
    exp_map: IntMatrix | None = None
    iota1: IntMatrix | None = None
    pi1: IntMatrix | None = None
    index_map: IntMatrix | None = None

    @classmethod
    def for_algebra(cls, *, k0_ideal: FGAbelianGroup, k1_ideal: FGAbelianGroup,
                    k0_quotient: FGAbelianGroup, k1_quotient: FGAbelianGroup,
                    exp_map: IntMatrix | None = None,
                    index_map: IntMatrix | None = None) -> "SixTermProblem":
        """The standard shape: ideal and quotient known, middle algebra wanted."""
        return cls(k0_ideal=k0_ideal, k1_ideal=k1_ideal,
                   k0_quotient=k0_quotient, k1_quotient=k1_quotient,
                   exp_map=exp_map, index_map=index_map)

    def slots(self) -> tuple[FGAbelianGroup | None, ...]:
        return tuple(getattr(self, name) for name in SLOT_NAMES)

    def maps(self) -> tuple[IntMatrix | None, ...]:
        return tuple(getattr(self, name) for name in MAP_NAMES)


def _unknown_positions(problem: SixTermProblem) -> tuple[int, int]:
    unknown = tuple(i for i, g in enumerate(problem.slots()) if g is None)
    for pair in _CORNER_PAIRS.values():
        positions = tuple(SLOT_NAMES.index(name) for name in pair)
        if unknown == positions:
            return positions
    raise InconsistentDataError(
        f"unknown slots must be the two K-groups of one corner, got "
        f"{tuple(SLOT_NAMES[i] for i in unknown)}")


def _check_map_shapes(problem: SixTermProblem) -> None:
    slots = problem.slots()
    for i, mat in enumerate(problem.maps()):
        if mat is None:
            continue
        src, dst = slots[i], slots[(i + 1) % 6]
        if src is None or dst is None:
            raise InconsistentDataError(
                f"map {MAP_NAMES[i]} given but an endpoint is unknown")
        if not (src.is_free and dst.is_free):
            raise InconsistentDataError(
                f"map {MAP_NAMES[i]} given between non-free groups; "
                "torsion endpoints are outside the solver's scope")
        if (mat.rows, mat.cols) != (dst.free_rank, src.free_rank):
            raise InconsistentDataError(
                f"map {MAP_NAMES[i]} has shape {mat.rows}x{mat.cols}, expected "
                f"{dst.free_rank}x{src.free_rank}")


def _check_exactness_of_knowns(problem: SixTermProblem) -> None:
    """Wherever two consecutive maps are both given, im = ker must hold."""
    slots = problem.slots()
    maps = problem.maps()
    for j in range(6):
        m_in, m_out = maps[(j - 1) % 6], maps[j]
        if m_in is None or m_out is None:
            continue
        middle = slots[j]
        composite = m_out @ m_in
        if any(x != 0 for row in composite.entries for x in row):
            raise InconsistentDataError(f"maps into and out of {SLOT_NAMES[j]} do not compose to zero")
        r_in, r_out = rank(m_in), rank(m_out)
        if r_in + r_out != middle.free_rank:
            raise InconsistentDataError(f"rank defect at {SLOT_NAMES[j]}: not exact")
        # im(m_in) = ker(m_out) also needs im(m_in) saturated in the kernel
        if any(d > 1 for d in smith_normal_form(m_in).invariant_factors()):
            raise InconsistentDataError(
                f"image of map into {SLOT_NAMES[j]} is a proper finite-index "
                "subgroup of the kernel: not exact")


def solve_six_term(problem: SixTermProblem):
    """Fill in the unknown corner of a six-term sequence, if it is forced.

    Returns a dict {slot_name: FGAbelianGroup} for the two unknown slots, or
    the UNDETERMINED sentinel when the data does not force them.  Raises
    InconsistentDataError when the known part already fails exactness.
    """
    positions = _unknown_positions(problem)
    _check_map_shapes(problem)
    _check_exactness_of_knowns(problem)

    slots = problem.slots()
    maps = problem.maps()
    solution: dict[str, FGAbelianGroup] = {}
    for x in positions:
        w = slots[(x - 1) % 6]
        y = slots[(x + 1) % 6]
        into_w = maps[(x - 2) % 6]   # a: V -> W, so coker(a) injects into X
        out_of_y = maps[(x + 1) % 6]  # d: Y -> Z, so X surjects onto ker(d)

        if w.is_zero:
            sub = ZERO_GROUP
        elif into_w is not None:
            sub = cokernel(into_w)
        else:
            return UNDETERMINED

        if y.is_zero:
            quot = ZERO_GROUP
        elif out_of_y is not None:
            quot = FGAbelianGroup.free(kernel_rank(out_of_y))
        else:
            return UNDETERMINED

        if not quot.is_free:
            # unreachable with matrix data (subgroups of free groups are
            # free), kept as the guard the splitting argument relies on
            return UNDETERMINED
        solution[SLOT_NAMES[x]] = sub.direct_sum(quot)
    return solution


def audit_exactness(problem: SixTermProblem, solution: dict[str, FGAbelianGroup]) -> bool:
    """Rank-and-torsion bookkeeping check of im = ker at all six nodes.

    With r_i the rank of the image of map i, exactness forces
    rank(G_j) = r_{j-1} + r_j at every node j, and the torsion of a solved
    slot must be exactly the torsion contributed by the cokernel it extends.
    """
    slots = list(problem.slots())
    maps = problem.maps()
    positions = _unknown_positions(problem)
    for x in positions:
        slots[x] = solution[SLOT_NAMES[x]]

    def sub_rank_at(x: int) -> int:
        """Rank of the coker(a) part sitting inside the solved slot x."""
        w = slots[(x - 1) % 6]
        into_w = maps[(x - 2) % 6]
        if w.is_zero:
            return 0
        if into_w is None:
            raise InconsistentDataError("audit requires the maps the solver used")
        return cokernel(into_w).free_rank

    image_rank = [0] * 6
    for i in range(6):
        if maps[i] is not None:
            image_rank[i] = rank(maps[i])
        elif i in positions:  # constructed map X ->> ker(d) <= Y
            image_rank[i] = slots[i].free_rank - sub_rank_at(i)
        elif (i + 1) % 6 in positions:  # constructed map W ->> coker(a) <= X
            image_rank[i] = sub_rank_at((i + 1) % 6)
        else:
            raise InconsistentDataError(f"map {MAP_NAMES[i]} missing away from the unknown corner")

    for j in range(6):
        if slots[j].free_rank != image_rank[(j - 1) % 6] + image_rank[j]:
            return False
    for x in positions:
        w = slots[(x - 1) % 6]
        if w.is_zero:
            sub_torsion: tuple[int, ...] = ()
        else:
            sub_torsion = cokernel(maps[(x - 2) % 6]).torsion
        if slots[x].torsion != sub_torsion:
            return False
    return True


def k_dimension_drop(p: int, q: int) -> tuple[FGAbelianGroup, FGAbelianGroup]:
    """K-theory of the dimension-drop interval with fibre sizes (p, q).

    The ideal of functions vanishing at both endpoints has K-groups (0, Z)
    and the endpoint evaluation quotient is a two-block matrix algebra with
    K-groups (Z^2, 0); the exponential map is [q, -p] in the rank-one
    generators.  Coprime (p, q) give (Z, 0); in general K1 = Z/gcd(p, q).
    """
    if not (isinstance(p, int) and isinstance(q, int)) or p < 1 or q < 1:
        raise ValueError("fibre sizes must be integers >= 1")
    problem = SixTermProblem.for_algebra(
        k0_ideal=ZERO_GROUP, k1_ideal=Z,
        k0_quotient=FGAbelianGroup.free(2), k1_quotient=ZERO_GROUP,
        exp_map=IntMatrix.from_rows([[q, -p]]),
        index_map=IntMatrix(0, 0, ()),
    )
    solution = solve_six_term(problem)
    assert solution is not UNDETERMINED
    return solution["k0_algebra"], solution["k1_algebra"]


def toeplitz_index_of_shift() -> int:
    """Boundary value of the shift's symbol class, in the fixed orientation.

    The shift v is an isometry, so 1 - v*v = 0, while 1 - vv* is the
    rank-one projection onto the first basis vector.  With [rank-one] = +1
    generating K0 of the compacts, the boundary of the degree-one unitary
    is [1 - v*v] - [1 - vv*] = -1.
    """
    return -1


def k_toeplitz() -> tuple[FGAbelianGroup, FGAbelianGroup]:
    """K-theory of the shift algebra via the compacts <| shift -> circle sequence."""
    problem = SixTermProblem.for_algebra(
        k0_ideal=Z, k1_ideal=ZERO_GROUP,
        k0_quotient=Z, k1_quotient=Z,
        exp_map=IntMatrix(0, 1, ()),
        index_map=IntMatrix.from_rows([[toeplitz_index_of_shift()]]),
    )
    solution = solve_six_term(problem)
    assert solution is not UNDETERMINED
    return solution["k0_algebra"], solution["k1_algebra"]
