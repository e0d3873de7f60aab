import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cstarlab.intlinalg import (
    FGAbelianGroup,
    IntMatrix,
    Z,
    ZERO_GROUP,
    cokernel,
    det_bareiss,
    invariant_factors,
    is_unimodular,
    kernel_rank,
    rank,
    smith_normal_form,
)
from cstarlab.rng import stream

from oracles import random_unimodular


@st.composite
def int_matrices(draw, max_dim=5, lo=-9, hi=9):
    rows = draw(st.integers(0, max_dim))
    cols = draw(st.integers(0, max_dim))
    data = [[draw(st.integers(lo, hi)) for _ in range(cols)] for _ in range(rows)]
    return IntMatrix.from_rows(data, cols=cols)


def is_divisibility_chain(diag):
    nonzero = [d for d in diag if d != 0]
    if any(d < 0 for d in nonzero):
        return False
    if any(b % a != 0 for a, b in zip(nonzero, nonzero[1:])):
        return False
    # zeros only at the end
    seen_zero = False
    for d in diag:
        if d == 0:
            seen_zero = True
        elif seen_zero:
            return False
    return True


class TestSmithNormalForm:
    def test_identity(self):
        m = IntMatrix.identity(2)
        snf = smith_normal_form(m)
        assert snf.d == m

    def test_diag_2_3(self):
        # frozen from direct multiplication: diag(2,3) ~ diag(1,6)
        m = IntMatrix.from_rows([[2, 0], [0, 3]])
        snf = smith_normal_form(m)
        assert snf.d == IntMatrix.from_rows([[1, 0], [0, 6]])
        assert snf.u @ m @ snf.v == snf.d
        assert is_unimodular(snf.u) and is_unimodular(snf.v)

    def test_gcd_row(self):
        # gcd(3, 2) = 1 by Euclid, so [3, -2] ~ [1, 0]
        m = IntMatrix.from_rows([[3, -2]])
        assert smith_normal_form(m).d == IntMatrix.from_rows([[1, 0]])

    def test_empty_matrices(self):
        for shape in [(0, 0), (0, 3), (3, 0)]:
            m = IntMatrix.zeros(*shape)
            snf = smith_normal_form(m)
            assert snf.d == m
            assert snf.u @ m @ snf.v == snf.d

    @settings(max_examples=150, deadline=None)
    @given(int_matrices())
    def test_snf_contract(self, m):
        snf = smith_normal_form(m)
        assert snf.u @ m @ snf.v == snf.d
        assert abs(det_bareiss(snf.u)) == 1
        assert abs(det_bareiss(snf.v)) == 1
        assert snf.d.is_diagonal()
        assert is_divisibility_chain(snf.d.diagonal())

    @settings(max_examples=150, deadline=None)
    @given(int_matrices())
    def test_rank_nullity(self, m):
        assert rank(m) + kernel_rank(m) == m.cols


class TestCokernel:
    def test_zero_endomorphism(self):
        assert cokernel(IntMatrix.zeros(1, 1)) == Z

    def test_bezout_surjection(self):
        # 3x - 2y covers every integer
        assert cokernel(IntMatrix.from_rows([[3, -2]])) == ZERO_GROUP

    def test_even_image(self):
        assert cokernel(IntMatrix.from_rows([[2, -4]])) == FGAbelianGroup.cyclic(2)

    def test_unimodular_invariance(self):
        rng = stream(2024)
        for _ in range(120):
            r, c = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            m = IntMatrix.from_rows(rng.integers(-9, 10, size=(r, c)).tolist(), cols=c)
            u = random_unimodular(rng, r)
            v = random_unimodular(rng, c)
            assert cokernel(m) == cokernel(u @ m @ v)


class TestKernelRank:
    def test_identity(self):
        assert kernel_rank(IntMatrix.identity(2)) == 0

    def test_line(self):
        # kernel of [3, -2] is spanned by (2, 3)
        assert kernel_rank(IntMatrix.from_rows([[3, -2]])) == 1

    def test_zero_row(self):
        assert kernel_rank(IntMatrix.zeros(1, 2)) == 2


class TestFGAbelianGroup:
    def test_chain_enforced(self):
        with pytest.raises(ValueError):
            FGAbelianGroup(0, (4, 2))
        with pytest.raises(ValueError):
            FGAbelianGroup(0, (1,))

    def test_invariant_factors_renormalise(self):
        assert invariant_factors([2, 3]) == (6,)
        assert invariant_factors([2, 2]) == (2, 2)
        assert invariant_factors([4, 6]) == (2, 12)
        assert invariant_factors([]) == ()

    def test_direct_sum(self):
        a = FGAbelianGroup(1, (2,))
        b = FGAbelianGroup(0, (3,))
        assert a.direct_sum(b) == FGAbelianGroup(1, (6,))

    def test_str(self):
        assert str(ZERO_GROUP) == "0"
        assert str(Z) == "Z"
        assert str(FGAbelianGroup(2, (2, 4))) == "Z^2 + Z/2 + Z/4"


def test_matrix_validation():
    with pytest.raises(ValueError):
        IntMatrix(1, 2, ((1,),))
    with pytest.raises(TypeError):
        IntMatrix(1, 1, ((1.5,),))
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1, 2]]) @ IntMatrix.from_rows([[1, 2]])
