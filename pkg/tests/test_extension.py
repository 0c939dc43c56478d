"""Sequence windows, the subdivision operator, and eigen-extensions.

The subdivision oracle materializes the bi-infinite band operator
L[i, j] = c_{2i-j} over a finite index box and compares the kernel
against a dense matrix-vector product.
"""

from __future__ import annotations

import concurrent.futures

import numpy as np
import pytest

import refinable as rf
from refinable import kernels
from refinable.errors import ExtensionError, ExtensionOverflowError

from conftest import make_mask

RNG = np.random.default_rng(55667788)


def dense_subdivision(alpha_vals, alpha_lo, coeffs, out_lo, out_len):
    """(Y L)_j = sum_i Y_i c_{2i - j} via an explicitly materialized band."""
    nmask = len(coeffs) - 1
    out = np.zeros(out_len, dtype=complex)
    for jj in range(out_len):
        j = out_lo + jj
        for idx, i in enumerate(range(alpha_lo, alpha_lo + len(alpha_vals))):
            k = 2 * i - j
            if 0 <= k <= nmask:
                out[jj] += alpha_vals[idx] * coeffs[k]
    return out


class TestSequenceWindow:
    def test_initial_values_and_bounds(self):
        w = rf.sequence_window(np.array([1.0, 2.0, 3.0], dtype=complex), lo=-1)
        assert (w.lo, w.hi) == (-1, 2)
        assert w.value(0) == 2.0
        np.testing.assert_array_equal(w.values(-1, 2), [1, 2, 3])

    def test_zero_extension_by_default(self):
        w = rf.sequence_window(np.array([5.0], dtype=complex), lo=0)
        np.testing.assert_array_equal(w.values(-3, 4), [0, 0, 0, 5, 0, 0, 0])

    def test_values_are_copies(self):
        w = rf.sequence_window(np.array([1.0, 2.0], dtype=complex), lo=0)
        v = w.values(0, 2)
        v[0] = 99.0
        assert w.value(0) == 1.0

    def test_concurrent_growth_is_consistent(self):
        mask = make_mask("bspline3")
        scale = rf.build_scale_matrices(mask)
        spectral = rf.eigen_structure(scale)
        row = spectral.basis[1]  # eigenvalue 1/2 row
        lam = spectral.rows[1].eigenvalue

        w = rf.eigen_extend(row, None, mask, lam)
        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            futures = [pool.submit(w.values, -5 * i, 5 * i + 4) for i in range(1, 9)]
            results = [f.result() for f in futures]
        reference = rf.eigen_extend(row, None, mask, lam)
        for i, got in enumerate(results, start=1):
            np.testing.assert_allclose(got, reference.values(-5 * i, 5 * i + 4), rtol=1e-12)


class TestSubdivision:
    def test_matches_dense_operator(self, all_masks):
        for mask in all_masks[:25]:
            coeffs = mask.coefficients
            alpha_lo = -4
            alpha_vals = RNG.normal(size=10) + 1j * RNG.normal(size=10)
            window = rf.sequence_window(np.asarray(alpha_vals, dtype=complex), lo=alpha_lo)
            out = rf.subdivision(window, mask)
            lo, hi, got = out.window()
            want = dense_subdivision(alpha_vals, alpha_lo, coeffs, lo, hi - lo)
            np.testing.assert_allclose(got, want, atol=1e-12 * max(1, np.abs(want).max()))

    def test_kernel_variants_agree(self):
        coeffs = np.array([0.25, 0.75, 0.75, 0.25], dtype=complex)
        alpha = RNG.normal(size=8) + 0j
        a = kernels.subdivision_numpy(alpha, -3, coeffs, -6, 12)
        b = kernels.subdivision_window(alpha, -3, coeffs, -6, 12)
        np.testing.assert_allclose(a, b, atol=1e-14)


class TestEigenExtend:
    def test_round_trip_restriction(self, corpus, pipeline):
        for name in ("bspline3", "d4", "jordan13"):
            mask = corpus[name]
            scale, spectral, _, _ = pipeline(mask)
            for info in spectral.rows:
                lam = info.eigenvalue
                if abs(lam) < 1e-10:
                    continue
                v = spectral.basis[info.index]
                shifted = v @ scale.shifted(lam)
                if np.abs(shifted).max() < 1e-9 * max(1, np.abs(v).max()):
                    prev = None
                else:
                    prev = rf.extend_vector(shifted, scale, lam)
                window = rf.eigen_extend(v, prev, mask, lam)
                np.testing.assert_allclose(
                    rf.restrict(window, mask), v, atol=1e-10 * max(1, np.abs(v).max())
                )

    def test_extension_satisfies_the_recurrence_everywhere(self, corpus):
        mask = corpus["bspline3"]
        scale = rf.build_scale_matrices(mask)
        spectral = rf.eigen_structure(scale)
        v = spectral.basis[1]
        lam = spectral.rows[1].eigenvalue  # 1/2
        w = rf.eigen_extend(v, None, mask, lam)
        y = w.values(-30, 34)
        lhs = dense_subdivision(y, -30, mask.coefficients, -20, 41)
        rhs = lam * w.values(-20, 21)
        np.testing.assert_allclose(lhs, rhs, atol=1e-9 * np.abs(y).max())

    def test_rejects_wrong_precondition(self, corpus):
        mask = corpus["bspline3"]
        v = np.array([1.0, 2.0, 3.0, 4.0], dtype=complex)
        with pytest.raises(ExtensionError):
            rf.eigen_extend(v, None, mask, 0.5)

    def test_rejects_zero_eigenvalue(self, corpus):
        mask = corpus["half"]
        with pytest.raises(ExtensionError):
            rf.eigen_extend(np.zeros(4, dtype=complex), None, mask, 0.0)

    def test_polynomial_growth_rate(self, corpus):
        # the eigenvalue-1/2 extension of D4 samples a degree-1 polynomial:
        # doubling the index doubles the value, no geometric blowup
        mask = corpus["d4"]
        scale = rf.build_scale_matrices(mask)
        spectral = rf.eigen_structure(scale)
        idx = next(
            i for i, r in enumerate(spectral.rows) if abs(r.eigenvalue - 0.5) < 1e-8
        )
        v = spectral.basis[idx]
        w = rf.eigen_extend(v, None, mask, 0.5)
        y100 = abs(w.value(100) - w.value(0))
        y200 = abs(w.value(200) - w.value(0))
        assert y200 / y100 == pytest.approx(2.0, rel=1e-6)

    @pytest.mark.filterwarnings("ignore::refinable.MaskSumWarning")
    def test_overflow_raises_with_index(self):
        # growth is |n|^(log2(1/|lam|)), so a legitimately tiny corner
        # eigenvalue overflows within ~1e300^(1/100) ~ 1000 indices
        mask = rf.mask_from_coefficients([1e-30, 1.0, 1.0, 1.0], name="adv")
        e0 = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
        window = rf.eigen_extend(e0, None, mask, 1e-30)
        with pytest.raises(ExtensionOverflowError) as err:
            window.values(-1500, 4)
        assert err.value.index is not None
        assert err.value.index < 0

    @pytest.mark.filterwarnings("ignore:overflow encountered:RuntimeWarning")
    def test_overflow_sentinel_at_kernel_level(self):
        coeffs = np.array([1.0, 1.0], dtype=complex)
        values = np.zeros(64, dtype=complex)
        values[0], values[1] = 1.0, 1.0
        stop = kernels.extend_forward(
            values, 0, 2, 64, coeffs, 1e-300, np.zeros(0, dtype=complex), 0,
            kernels.OVERFLOW_LIMIT,
        )
        assert stop < 64  # overflowing index reported, no silent inf


class TestKernelOfL:
    def test_half_mask_alternating_kernel(self, corpus):
        kernel = rf.kernel_of_L(corpus["half"])
        assert kernel.dimension == 1
        w = kernel.windows[0]
        vals = w.values(-6, 7)
        expected = vals[6] * np.array([(-1.0) ** k for k in range(-6, 7)])
        np.testing.assert_allclose(vals, expected, rtol=1e-9)

    def test_kernel_sequences_annihilate_under_subdivision(self, corpus):
        kernel = rf.kernel_of_L(corpus["half"])
        mask = corpus["half"]
        for w in kernel.windows:
            y = w.values(-12, 16)
            out = dense_subdivision(y, -12, mask.coefficients, -8, 17)
            assert np.abs(out).max() < 1e-10

    def test_independent_mask_has_trivial_kernel(self, corpus):
        kernel = rf.kernel_of_L(corpus["bspline3"])
        assert kernel.dimension == 0
        assert kernel.windows == ()
