import math
from fractions import Fraction

import numpy as np
import pytest

from cstarlab.rng import stream
from cstarlab.transport import (
    DiscreteMeasure,
    EigenMultiset,
    IncompatibleSpacesError,
    NormalMatrix,
    NotNormalError,
    SizeMismatchError,
    bottleneck_brute_force,
    matching_distance,
    operator_norm,
    random_hermitian,
    random_normal,
    random_unitary,
    sorted_matching_value,
    spectral_measure,
    unitary_distance,
    wasserstein_inf,
    winf_pair,
)


class TestMatchingDistance:
    def test_identical_multisets(self):
        assert matching_distance([1.0, 2.0, 3.0], [3.0, 1.0, 2.0]) == 0.0

    def test_frozen_two_point_case(self):
        # brute force over the two permutations of S_2 gives 0.5
        assert matching_distance([0.0, 1.0], [0.5, 0.5]) == 0.5
        assert bottleneck_brute_force([0.0, 1.0], [0.5, 0.5]) == 0.5

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            matching_distance([1.0], [1.0, 2.0])

    def test_threshold_equals_brute_force(self):
        rng = stream(101)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            assert matching_distance(a, b) == bottleneck_brute_force(a, b)

    def test_sorted_attainment_on_real_multisets(self):
        rng = stream(102)
        for trial in range(200):
            n = int(rng.integers(1, 9))
            if trial % 2:  # spectra of random self-adjoint matrices
                a = np.linalg.eigvalsh(random_hermitian(n, rng).array)
                b = np.linalg.eigvalsh(random_hermitian(n, rng).array)
            else:
                a, b = rng.standard_normal(n), rng.standard_normal(n)
            assert sorted_matching_value(a, b) == bottleneck_brute_force(a, b)

    def test_metric_properties(self):
        rng = stream(103)
        for _ in range(150):
            n = int(rng.integers(1, 7))
            a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            dab = matching_distance(a, b)
            assert dab == matching_distance(b, a)
            # float slack: each value is a rounded pairwise distance
            assert matching_distance(a, c) <= dab + matching_distance(b, c) + 1e-12
            # indiscernibles: distinct multisets are separated
            if sorted(zip(a.real, a.imag)) != sorted(zip(b.real, b.imag)):
                assert dab > 0.0
        assert matching_distance([1.0 + 1j], [1.0 + 1j]) == 0.0

    def test_eigen_multiset_wrapper(self):
        ms = EigenMultiset((1.0, 2.0))
        assert matching_distance(ms, ms) == 0.0
        with pytest.raises(ValueError):
            EigenMultiset(())


class TestNormalMatrix:
    def test_rejects_non_normal(self):
        with pytest.raises(NotNormalError):
            NormalMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_flags(self):
        rng = stream(7)
        assert random_hermitian(4, rng).is_hermitian
        u = random_unitary(4, rng)
        assert u.is_unitary and not u.is_hermitian
        nm = random_normal(4, rng)
        assert nm.normality_residual <= 1e-10

    def test_operator_norm_is_top_singular_value(self):
        rng = stream(8)
        g = rng.standard_normal((5, 5))
        assert operator_norm(g) == pytest.approx(np.linalg.svd(g, compute_uv=False)[0])


class TestUnitaryDistance:
    def test_identical_inputs(self):
        a = random_hermitian(3, stream(1))
        res = unitary_distance(a, a)
        assert res.value == pytest.approx(0.0, abs=1e-12)
        assert res.converged
        assert np.allclose(res.unitary, np.eye(3))

    def test_permuted_diagonals(self):
        a = NormalMatrix(np.diag([0.0, 1.0]).astype(complex))
        b = NormalMatrix(np.diag([1.0, 0.0]).astype(complex))
        res = unitary_distance(a, b)
        assert res.value == pytest.approx(0.0, abs=1e-10)

    def test_hermitian_pairs_match_spectral_distance(self):
        rng = stream(2)
        for n in (2, 4, 6):
            for _ in range(10):
                a, b = random_hermitian(n, rng), random_hermitian(n, rng)
                res = unitary_distance(a, b, 1e-8)
                delta = matching_distance(np.linalg.eigvalsh(a.array),
                                          np.linalg.eigvalsh(b.array))
                assert res.converged
                assert abs(res.value - delta) <= 1e-6
                assert res.value >= res.hermitian_lower_bound - 1e-7

    def test_certificate_unitary(self):
        rng = stream(3)
        a, b = random_hermitian(4, rng), random_hermitian(4, rng)
        res = unitary_distance(a, b)
        u = res.unitary
        assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-10)
        achieved = operator_norm(a.array - u @ b.array @ u.conj().T)
        assert achieved == pytest.approx(res.value, abs=1e-12)

    def test_normal_pairs_never_exceed_matching(self):
        # aligning the eigenbases along an optimal matching realises the
        # matching value, so the orbit distance is at most that; for general
        # normal pairs it may drop strictly below and no equality is claimed
        rng = stream(4)
        for _ in range(10):
            a, b = random_normal(3, rng), random_normal(3, rng)
            res = unitary_distance(a, b)
            delta = matching_distance(a.spectrum(), b.spectrum())
            assert res.value <= delta + 1e-8

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            unitary_distance(np.eye(2), np.eye(3))

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            unitary_distance(np.eye(2), np.eye(2), tol=0.0)


class TestDiscreteMeasure:
    def test_rejects_floats_and_bad_sums(self):
        with pytest.raises(TypeError):
            DiscreteMeasure((0.0,), (1.0,))
        with pytest.raises(ValueError):
            DiscreteMeasure((0.0, 1.0), (Fraction(1, 2), Fraction(1, 3)))
        with pytest.raises(ValueError):
            DiscreteMeasure((0.0,), (Fraction(0),))

    def test_point_masses(self):
        assert wasserstein_inf(DiscreteMeasure.point(0.0), DiscreteMeasure.point(3 + 4j)) == 5.0

    def test_equal_weights_reduce_to_matching(self):
        rng = stream(40)
        for _ in range(50):
            n = int(rng.integers(1, 9))
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            mu = DiscreteMeasure.equal_weights(tuple(x))
            nu = DiscreteMeasure.equal_weights(tuple(y))
            assert wasserstein_inf(mu, nu) == bottleneck_brute_force(x, y)

    def test_denominator_rescaling_invariance(self):
        # same measure written over a coarser and a finer denominator
        mu1 = DiscreteMeasure((0.0, 1.0), (Fraction(1, 2), Fraction(1, 2)))
        mu2 = DiscreteMeasure((0.0, 0.0, 1.0, 1.0),
                              (Fraction(1, 4), Fraction(1, 4), Fraction(1, 4), Fraction(1, 4)))
        nu = DiscreteMeasure((0.25, 0.8), (Fraction(3, 4), Fraction(1, 4)))
        assert wasserstein_inf(mu1, nu) == wasserstein_inf(mu2, nu)

    def test_unequal_weight_example(self):
        mu = DiscreteMeasure((0.0, 1.0), (Fraction(1, 3), Fraction(2, 3)))
        nu = DiscreteMeasure((0.25, 0.75), (Fraction(1, 2), Fraction(1, 2)))
        # one third of the mass at 1 must travel to 0.25
        assert wasserstein_inf(mu, nu) == 0.75

    def test_incompatible_spaces(self):
        mu = DiscreteMeasure.point(0.0, space="interval")
        nu = DiscreteMeasure.point(1.0, space="circle")
        with pytest.raises(IncompatibleSpacesError):
            wasserstein_inf(mu, nu)

    def test_metric_oracle(self):
        mu = DiscreteMeasure.point((0.0, 0.0))
        nu = DiscreteMeasure.point((3.0, 4.0))
        value = wasserstein_inf(mu, nu, metric=lambda x, y: math.dist(x, y))
        assert value == 5.0


class TestSpectralMeasure:
    def test_identity_matrix(self):
        sm = spectral_measure(np.eye(3))
        assert sm.atoms == (1 + 0j,)
        assert sm.weights == (Fraction(1),)

    def test_projection_weights(self):
        proj = np.diag([1.0, 1.0, 1.0, 0.0, 0.0])
        sm = spectral_measure(proj)
        weights = dict(zip(sm.atoms, sm.weights))
        assert weights[0j] == Fraction(2, 5)
        assert weights[1 + 0j] == Fraction(3, 5)

    def test_moments_match_traces(self):
        rng = stream(41)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            a = random_normal(n, rng)
            sm = spectral_measure(a)
            for k in range(1, 5):
                moment = sum((atom ** k) * complex(w) for atom, w in zip(sm.atoms, sm.weights))
                trace = np.trace(np.linalg.matrix_power(a.array, k)) / n
                assert abs(moment - trace) < 1e-8

    def test_winf_pair_hermitian_equals_matching(self):
        rng = stream(42)
        for n in (2, 3, 5):
            a, b = random_hermitian(n, rng), random_hermitian(n, rng)
            delta = matching_distance(np.linalg.eigvalsh(a.array), np.linalg.eigvalsh(b.array))
            assert winf_pair(a, b) == pytest.approx(delta, abs=1e-9)

    def test_winf_pair_identical(self):
        a = random_normal(4, stream(43))
        assert winf_pair(a, a) == 0.0

    def test_normal_pairs_table_without_equality_claim(self):
        # record (W_inf, d_U) for random normal pairs: the orbit distance is
        # bounded by the spectral transport value (alignment), equality is
        # deliberately not asserted
        rng = stream(44)
        for _ in range(5):
            a, b = random_normal(3, rng), random_normal(3, rng)
            w = winf_pair(a, b)
            res = unitary_distance(a, b)
            assert w >= 0.0 and res.value >= 0.0
            assert res.value <= w + 1e-6
