"""Jordan structure of the scale matrix, accuracy, independence, and
kernel transfer between the full matrix and its interior block.

The central oracle is the defining identity B T = J B together with the
chain bookkeeping: every chain row must satisfy v_j (T - lam I) = v_{j-1}
exactly (bottom rows annihilate), independently of how the rows were
constructed.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

import refinable as rf
from refinable.errors import SpectralError
from refinable.spectral import VERDICT_DEPENDENT, VERDICT_INDEPENDENT

from conftest import make_mask


def chain_residual(spectral: rf.SpectralData, scale: rf.ScaleMatrices) -> float:
    """max residual of v_j (T - lam I) = v_{j-1} over all chains."""
    worst = 0.0
    for chain in spectral.chains:
        lam = chain.eigenvalue
        rows = chain.rows  # bottom-first global row indices
        for pos, row in enumerate(rows):
            v = spectral.basis[row]
            shifted = v @ scale.shifted(lam)
            want = spectral.basis[rows[pos - 1]] if pos > 0 else np.zeros_like(v)
            worst = max(worst, float(np.abs(shifted - want).max()))
    return worst


class TestEigenStructure:
    def test_similarity_identity_on_whole_corpus(self, all_masks, pipeline):
        for mask in all_masks:
            scale, spectral, _, _ = pipeline(mask)
            lhs = spectral.basis @ scale.full
            rhs = spectral.jordan @ spectral.basis
            scale_ref = max(1.0, float(np.abs(scale.full).max()))
            assert np.abs(lhs - rhs).max() <= 1e-8 * scale_ref, mask.name

    def test_chain_bookkeeping_on_whole_corpus(self, all_masks, pipeline):
        for mask in all_masks:
            scale, spectral, _, _ = pipeline(mask)
            assert chain_residual(spectral, scale) <= 1e-7, mask.name

    def test_group_multiplicities_sum_to_dimension(self, all_masks, pipeline):
        for mask in all_masks:
            _, spectral, _, _ = pipeline(mask)
            assert sum(g.algebraic for g in spectral.groups) == mask.n + 1
            for g in spectral.groups:
                assert sum(g.chain_lengths) == g.algebraic
                assert len(g.chain_lengths) == g.geometric

    def test_groups_ordered_by_modulus_then_angle(self, all_masks, pipeline):
        for mask in all_masks:
            _, spectral, _, _ = pipeline(mask)
            keys = [
                (-round(abs(g.eigenvalue), 9), round(np.angle(g.eigenvalue), 9))
                for g in spectral.groups
            ]
            assert keys == sorted(keys), mask.name

    def test_convention_rows(self, all_masks, pipeline):
        # first row of the c_0 group is e_0; the global last row is e_N
        for mask in all_masks:
            _, spectral, _, _ = pipeline(mask)
            size = mask.n + 1
            if not (spectral.convention_first and spectral.convention_last):
                continue
            e0 = np.zeros(size)
            e0[0] = 1.0
            en = np.zeros(size)
            en[-1] = 1.0
            np.testing.assert_allclose(spectral.basis[size - 1], en, atol=1e-9)
            c0_rows = [
                r.index
                for r in spectral.rows
                if abs(r.eigenvalue - mask.c(0)) < 1e-8 * max(1, abs(mask.c(0)))
            ]
            np.testing.assert_allclose(spectral.basis[min(c0_rows)], e0, atol=1e-9)

    def test_basis_is_invertible(self, all_masks, pipeline):
        for mask in all_masks:
            _, spectral, _, _ = pipeline(mask)
            assert np.linalg.cond(spectral.basis) < 1e10, mask.name

    def test_row_info_is_complete_and_consistent(self, all_masks, pipeline):
        for mask in all_masks[:20]:
            _, spectral, _, _ = pipeline(mask)
            assert [r.index for r in spectral.rows] == list(range(mask.n + 1))
            for chain in spectral.chains:
                for pos, row in enumerate(chain.rows):
                    info = spectral.rows[row]
                    if info.kind == "chain":
                        assert info.position == pos
                        assert abs(info.eigenvalue - chain.eigenvalue) < 1e-12


class TestExactMode:
    def test_bspline3_exact_spectrum(self):
        spectral = rf.eigen_structure(make_mask("bspline3"), exact=True)
        assert spectral.is_exact
        assert spectral.residual == 0.0
        exact = sorted(
            (g.exact_eigenvalue for g in spectral.groups), reverse=True
        )
        assert exact == sorted(
            [Fraction(1), Fraction(1, 2), Fraction(1, 4)], reverse=True
        )

    def test_exact_similarity_is_exact(self):
        import refinable.exact as xq

        for name in ("bspline3", "jordan13", "half", "haar"):
            spectral = rf.eigen_structure(make_mask(name), exact=True)
            scale = rf.build_scale_matrices(make_mask(name))
            basis = [list(row) for row in spectral.exact_basis]
            jordan = [list(row) for row in spectral.exact_jordan]
            lhs = xq.mat_mul(basis, scale.exact_rows())
            rhs = xq.mat_mul(jordan, basis)
            assert lhs == rhs, name
            # the float rendition is the exact data rounded once
            assert np.abs(
                spectral.basis - np.array(basis, dtype=complex)
            ).max() < 1e-15

    @pytest.mark.filterwarnings("ignore::refinable.MaskSumWarning")
    def test_exact_mode_requires_rational_spectrum(self):
        # rational mask whose core has irrational eigenvalues
        mask = rf.mask_from_coefficients(["1/2", "1/4", "1", "3/4", "1/2"], name="irr")
        with pytest.raises(SpectralError):
            rf.eigen_structure(mask, exact=True)
        # auto mode silently falls back to float
        spectral = rf.eigen_structure(mask)
        assert not spectral.is_exact

    def test_exact_mode_rejects_float_mask(self):
        with pytest.raises(SpectralError):
            rf.eigen_structure(make_mask("d4"), exact=True)

    def test_random_short_rational_masks_have_zero_residual(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(1, 3))
            coeffs = [
                Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 7)))
                for _ in range(n + 1)
            ]
            if coeffs[0] == 0 or coeffs[-1] == 0:
                continue
            with np.testing.suppress_warnings() as sup:
                sup.filter(rf.MaskSumWarning)
                mask = rf.mask_from_coefficients(coeffs)
            spectral = rf.eigen_structure(mask, exact=True)
            assert spectral.is_exact and spectral.residual == 0.0


class TestJordan13:
    def test_insertion_mode_with_true_chain_lengths(self):
        mask = make_mask("jordan13")
        spectral = rf.eigen_structure(mask)
        assert not spectral.jordan_canonical
        group = next(g for g in spectral.groups if abs(g.eigenvalue - 1 / 3) < 1e-9)
        assert group.algebraic == 3
        assert sorted(group.chain_lengths, reverse=True) == [2, 1]
        kinds = [r.kind for r in spectral.rows]
        assert kinds.count("convention") == 2

    def test_two_chain_bottom_is_the_corner_difference(self):
        # the length-2 chain bottom must lie in ker(T - I/3) ∩ im(T - I/3),
        # which is spanned by e_0 - e_3; recover it from the kept chain row
        mask = make_mask("jordan13")
        scale = rf.build_scale_matrices(mask)
        spectral = rf.eigen_structure(mask)
        lam = 1.0 / 3.0
        tops = [
            r
            for r in spectral.rows
            if r.kind == "chain"
            and abs(r.eigenvalue - lam) < 1e-9
            and rf.minimal_order(spectral.basis[r.index], scale, r.eigenvalue) == 2
        ]
        assert len(tops) == 1
        top = spectral.basis[tops[0].index]
        bottom = top @ scale.shifted(lam)
        np.testing.assert_allclose(
            bottom / bottom[0], [1.0, 0.0, 0.0, -1.0], atol=1e-9
        )
        np.testing.assert_allclose(
            bottom @ scale.shifted(lam), np.zeros(4), atol=1e-10
        )


class TestMinimalOrder:
    def test_orders_on_bspline3(self):
        mask = make_mask("bspline3")
        scale = rf.build_scale_matrices(mask)
        spectral = rf.eigen_structure(scale)
        for info in spectral.rows:
            v = spectral.basis[info.index]
            assert rf.minimal_order(v, scale, info.eigenvalue) == 1

    def test_order_two_for_chain_top(self):
        mask = make_mask("jordan13")
        scale = rf.build_scale_matrices(mask)
        spectral = rf.eigen_structure(scale)
        orders = {
            info.index: rf.minimal_order(
                spectral.basis[info.index], scale, info.eigenvalue
            )
            for info in spectral.rows
            if abs(info.eigenvalue - 1 / 3) < 1e-9
        }
        # algebraic multiplicity 3 with chain lengths (2, 1): exactly one
        # kept row needs one application of (T - lam I) to reach an eigenvector
        assert sorted(orders.values()) == [1, 1, 2]

    def test_rejects_non_generalized_vector(self):
        mask = make_mask("bspline3")
        scale = rf.build_scale_matrices(mask)
        with pytest.raises(SpectralError):
            rf.minimal_order(np.array([1.0, 1.0, 1.0, 1.0]), scale, 0.5)


class TestSpectrumOf:
    def test_multiplicities_of_constructed_matrix(self):
        a = np.diag([2.0, 2.0, -1.0]).astype(complex)
        a[0, 1] = 1.0
        pairs = rf.spectrum_of(a)
        as_dict = {complex(np.round(v, 9)): m for v, m, _ in pairs}
        assert as_dict == {(2 + 0j): 2, (-1 + 0j): 1}

    def test_exact_rows_give_exact_values(self):
        rows = [[Fraction(1, 2), Fraction(0)], [Fraction(1), Fraction(1, 2)]]
        a = np.array([[0.5, 0.0], [1.0, 0.5]], dtype=complex)
        pairs = rf.spectrum_of(a, rows)
        assert pairs[0][1] == 2
        assert pairs[0][2] == Fraction(1, 2)


class TestAccuracy:
    def test_bspline3_polynomials(self):
        acc = rf.accuracy(make_mask("bspline3"), exact=True)
        assert acc.order == 3
        assert acc.exact_coefficients[0] == (Fraction(1),)
        assert acc.exact_coefficients[1] == (Fraction(3, 2), Fraction(-1))
        assert acc.exact_coefficients[2] == (Fraction(2), Fraction(-3), Fraction(1))

    def test_leading_coefficient_is_signed_unit(self):
        acc = rf.accuracy(make_mask("bspline3"))
        for s, coeffs in enumerate(acc.coefficients):
            assert coeffs[-1] == pytest.approx((-1.0) ** s)

    def test_d4_order_two(self):
        acc = rf.accuracy(make_mask("d4"))
        assert acc.order == 2
        # first moment of the reproduction polynomial: (3 - sqrt(3)) / 2
        assert acc.coefficients[1][0].real == pytest.approx(
            (3 - np.sqrt(3)) / 2, rel=1e-10
        )

    def test_jordan13_and_half_order_one(self):
        assert rf.accuracy(make_mask("jordan13")).order == 1
        assert rf.accuracy(make_mask("half")).order == 1

    def test_eigen_residuals_verified(self, all_masks, pipeline):
        for mask in all_masks[:20]:
            scale, _, _, _ = pipeline(mask)
            acc = rf.accuracy(scale)
            for s, v in enumerate(acc.vectors):
                resid = np.abs(v @ scale.full - 2.0 ** (-s) * v).max()
                assert resid <= 1e-7 * max(1, np.abs(v).max())


class TestIndependence:
    def test_half_is_dependent_and_consistent(self):
        result = rf.independence_test(make_mask("half"))
        assert result.verdict == VERDICT_DEPENDENT
        assert result.gcd_degree == 1
        assert result.kernel_dimension == 1
        assert not result.core_invertible
        assert result.consistent
        assert result.diagnostic is None

    def test_bspline3_not_contradicted(self):
        result = rf.independence_test(make_mask("bspline3"))
        assert result.verdict == VERDICT_INDEPENDENT
        assert result.gcd_degree == 0
        assert result.core_invertible
        assert result.consistent

    def test_verdicts_never_claim_independence(self, all_masks):
        for mask in all_masks[:30]:
            verdict = rf.independence_test(mask).verdict
            assert verdict in (VERDICT_DEPENDENT, VERDICT_INDEPENDENT)

    def test_haar_has_empty_core(self):
        result = rf.independence_test(make_mask("haar"))
        assert result.core_invertible  # vacuously: the core is 0 x 0
        assert result.gcd_degree == 0


class TestKernelTransferAndLift:
    def _simple_noncorner_rows(self, mask, scale, spectral):
        c0, cn = mask.c(0), mask.c(mask.n)
        for info in spectral.rows:
            lam = info.eigenvalue
            if abs(lam) < 1e-8:
                continue
            if min(abs(lam - c0), abs(lam - cn)) < 1e-6:
                continue
            if rf.minimal_order(spectral.basis[info.index], scale, lam) != 1:
                continue
            yield info

    def test_round_trip_on_corpus(self, corpus, pipeline):
        for name in ("bspline3", "d4", "half"):
            mask = corpus[name]
            scale, spectral, _, _ = pipeline(mask)
            count = 0
            for info in self._simple_noncorner_rows(mask, scale, spectral):
                v = spectral.basis[info.index]
                middle = rf.kernel_transfer(v, scale, info.eigenvalue, 1)
                lifted = rf.kernel_lift(middle, scale, info.eigenvalue, 1)
                np.testing.assert_allclose(lifted, v, atol=1e-8 * max(1, np.abs(v).max()))
                count += 1
            assert count > 0, name

    def test_transfer_refuses_zero_eigenvalue(self, corpus):
        scale = rf.build_scale_matrices(corpus["half"])
        with pytest.raises(SpectralError):
            rf.kernel_transfer(np.zeros(4), scale, 0.0, 1)

    def test_lift_refuses_corner_eigenvalues(self, corpus):
        mask = corpus["bspline3"]
        scale = rf.build_scale_matrices(mask)
        with pytest.raises(SpectralError):
            rf.kernel_lift(np.zeros(2), scale, mask.c(0), 1)

    def test_transfer_vector_lies_in_core_kernel(self, corpus):
        mask = corpus["bspline3"]
        scale = rf.build_scale_matrices(mask)
        spectral = rf.eigen_structure(scale)
        info = next(r for r in spectral.rows if abs(r.eigenvalue - 1.0) < 1e-9)
        v = spectral.basis[info.index]
        middle = rf.kernel_transfer(v, scale, 1.0, 1)
        core_shift = scale.core - np.eye(mask.n - 1)
        assert np.abs(middle @ core_shift).max() < 1e-10


class TestClusteringEscalation:
    def test_tight_cluster_still_resolves(self):
        # eigenvalues within ~1e-9 of each other: escalation must either
        # merge them into one group or keep them separate consistently,
        # without raising
        eps = 1e-9
        with np.testing.suppress_warnings() as sup:
            sup.filter(rf.MaskSumWarning)
            mask = rf.mask_from_coefficients([0.5 + eps, 1.0, 0.5, 1.0, 0.5 - eps])
        spectral = rf.eigen_structure(mask)
        scale = rf.build_scale_matrices(mask)
        lhs = spectral.basis @ scale.full
        rhs = spectral.jordan @ spectral.basis
        assert np.abs(lhs - rhs).max() <= 1e-6
