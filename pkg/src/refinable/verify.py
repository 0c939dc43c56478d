"""End-to-end verification battery for one mask.

Each check is an independently computable identity of the refinable
function and its spectral data; the battery reports one residual and
pass/fail per check. It is intentionally redundant with the theory — the
checks recompute everything from sampled values rather than trusting the
constructions that produced them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .evaluate import (
    DEFAULT_LEVEL,
    HomogeneousBasis,
    build_homogeneous_basis,
    evaluate_phi,
    extend_vector,
    homogeneity_residual,
    reconstruct_phi,
    verify_dependency,
)
from .extension import kernel_of_L
from .mask import Mask, build_scale_matrices, mask_polynomials
from .spectral import (
    SpectralData,
    accuracy,
    eigen_structure,
    independence_test,
    spectrum_of,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float | None = None
    tolerance: float | None = None
    detail: str | None = None


@dataclass(frozen=True)
class BatteryResult:
    mask: Mask
    level: int
    tolerance: float
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _expand(spectrum):
    out = []
    for value, mult, _ in spectrum:
        out.extend([complex(value)] * int(mult))
    return out


def _multiset_distance(a, b) -> float:
    """Greedy nearest-match distance between two eigenvalue multisets."""
    if len(a) != len(b):
        return float("inf")
    b = list(b)
    worst = 0.0
    for va in a:
        best_i = min(range(len(b)), key=lambda i: abs(va - b[i]))
        worst = max(worst, abs(va - b[best_i]))
        b.pop(best_i)
    return worst


def _check_spectrum(scale, tol) -> CheckResult:
    rational = scale.mask.is_rational
    full = _expand(spectrum_of(scale.full, scale.exact_rows() if rational else None))
    core = _expand(spectrum_of(scale.core, scale.exact_core_rows() if rational else None))
    head = _expand(spectrum_of(scale.head, None))
    tail = _expand(spectrum_of(scale.tail, None))
    c0 = complex(scale.full[0, 0])
    cn = complex(scale.full[scale.n, scale.n])
    d_full = _multiset_distance(full, core + [c0, cn])
    d_head = _multiset_distance(head, core + [c0])
    d_tail = _multiset_distance(tail, core + [cn])
    worst = max(d_full, d_head, d_tail)
    scale_ref = max(1.0, float(np.abs(scale.full).max()))
    return CheckResult(
        name="spectrum-decomposition",
        passed=worst <= tol * scale_ref * 10,
        residual=worst,
        tolerance=tol * scale_ref * 10,
        detail="eig(T) = {c0, cN} + eig(M); eig(T0) = {c0} + eig(M); eig(T1) = {cN} + eig(M)",
    )


def _check_jordan(spectral: SpectralData, tol) -> CheckResult:
    scale_ref = max(1.0, float(np.abs(spectral.scale.full).max()))
    return CheckResult(
        name="jordan-identity",
        passed=spectral.residual <= tol * scale_ref,
        residual=spectral.residual,
        tolerance=tol * scale_ref,
        detail="max |basis T - jordan basis|"
        + ("" if spectral.jordan_canonical else " (insertion mode, similarity jordan)"),
    )


def _check_conventions(spectral: SpectralData) -> CheckResult:
    size = spectral.n + 1
    last = spectral.basis[size - 1]
    e_n = np.zeros(size, dtype=complex)
    e_n[size - 1] = 1.0
    last_ok = float(np.abs(last - e_n).max()) <= 1e-9
    ok = spectral.convention_first and spectral.convention_last and last_ok
    return CheckResult(
        name="conventions",
        passed=ok,
        detail=(
            f"e0 leads its group: {spectral.convention_first}; "
            f"eN is the global last row: {spectral.convention_last and last_ok}"
        ),
    )


def _check_extension(basis: HomogeneousBasis, tol) -> CheckResult:
    """Recompute Y L on a window and compare with lam Y + Y_prev."""
    scale = basis.spectral.scale
    mask = scale.mask
    n = mask.n
    w_lo, w_hi = -6, n + 7
    n_lo, n_hi = 2 * w_lo, 2 * (w_hi - 1) - n  # indices fully determined by the window
    worst = 0.0
    for f in basis.functions:
        y_vals = f.window.values(w_lo, w_hi)
        lhs = kernels.subdivision_window(
            y_vals, w_lo, mask.coefficients, n_lo, n_hi - n_lo + 1
        )
        lam = complex(f.eigenvalue)
        if f.order > 1:
            prev_vec = f.vector @ scale.shifted(lam)
            prev = extend_vector(prev_vec, scale, lam).values(n_lo, n_hi + 1)
        else:
            prev = np.zeros(n_hi - n_lo + 1, dtype=complex)
        rhs = lam * f.window.values(n_lo, n_hi + 1) + prev
        scale_ref = max(1.0, float(np.abs(y_vals).max(initial=0.0)))
        worst = max(worst, float(np.abs(lhs - rhs).max(initial=0.0)) / scale_ref)
    return CheckResult(
        name="extension-recurrence",
        passed=worst <= tol,
        residual=worst,
        tolerance=tol,
        detail="Y L = lam Y + Y_prev rechecked through the subdivision operator",
    )


def _check_homogeneity(basis: HomogeneousBasis, tol) -> CheckResult:
    worst = 0.0
    for f in basis.functions:
        scale_ref = max(1.0, float(np.abs(f.values).max(initial=0.0)))
        worst = max(worst, homogeneity_residual(f) / scale_ref)
    return CheckResult(
        name="homogeneity",
        passed=worst <= tol,
        residual=worst,
        tolerance=tol,
        detail="sum_k C(r,k)(-lam)^(r-k) h(x/2^k) = 0 on the dyadic grid",
    )


def _check_origin(basis: HomogeneousBasis, tol) -> CheckResult:
    worst = 0.0
    checked = 0
    for f in basis.functions:
        if abs(f.eigenvalue - 1.0) <= 1e-6:
            continue
        checked += 1
        scale_ref = max(1.0, float(np.abs(f.values).max(initial=0.0)))
        worst = max(worst, abs(complex(f.at_index(np.array([0]))[0])) / scale_ref)
    return CheckResult(
        name="zero-at-origin",
        passed=worst <= tol,
        residual=worst,
        tolerance=tol,
        detail=f"h(0) = 0 for the {checked} rows with eigenvalue != 1",
    )


def _check_reconstruction(basis: HomogeneousBasis, tol) -> CheckResult:
    rec = reconstruct_phi(basis)
    scale_ref = max(1.0, float(np.abs(rec.reference).max(initial=0.0)))
    bound = tol * max(1.0, rec.condition) * scale_ref
    return CheckResult(
        name="reconstruction",
        passed=rec.residual <= bound,
        residual=rec.residual,
        tolerance=bound,
        detail=f"phi on [0,1] from the h rows; basis block condition {rec.condition:.6g}",
    )


def _check_accuracy(mask: Mask, spectral: SpectralData, phi, tol) -> CheckResult:
    acc = accuracy(spectral.scale)
    step = 2**phi.level
    worst = 0.0
    xs = np.arange(step + 1) / step
    for s in range(acc.order):
        coeffs = acc.coefficients[s]
        g = np.zeros(step + 1, dtype=complex)
        for k in range(-1, mask.n + 1):
            pk = np.polynomial.polynomial.polyval(k, coeffs)
            idx = np.arange(step + 1) + k * step
            ok = (idx >= 0) & (idx < len(phi.values))
            g[ok] += pk * phi.values[idx[ok]]
        target = xs.astype(complex) ** s
        scale_ref = max(1.0, float(np.abs(coeffs).max()))
        worst = max(worst, float(np.abs(g - target).max()) / scale_ref)
    return CheckResult(
        name="accuracy-reproduction",
        passed=worst <= tol,
        residual=worst,
        tolerance=tol,
        detail=f"sum_k p_s(k) phi(x+k) = x^s on [0,1] for s < {acc.order}",
    )


def _check_independence(mask: Mask, spectral: SpectralData, phi, level, tol):
    result = independence_test(spectral.scale, mask_polynomials(mask))
    checks = [
        CheckResult(
            name="independence-consistency",
            passed=result.consistent,
            detail=f"verdict: {result.verdict}; gcd degree {result.gcd_degree}; "
            f"core invertible {result.core_invertible}"
            + (f"; {result.diagnostic}" if result.diagnostic else ""),
        )
    ]
    if result.gcd_degree > 0:
        kernel = kernel_of_L(mask)
        worst = 0.0
        all_dependent = True
        for window in kernel.windows:
            report = verify_dependency(mask, window, level=level, phi=phi, tolerance=tol)
            worst = max(worst, report.max_residual)
            all_dependent = all_dependent and report.dependent
        checks.append(
            CheckResult(
                name="dependency-witness",
                passed=all_dependent,
                residual=worst,
                tolerance=tol,
                detail=f"{kernel.dimension} kernel sequences annihilate the translates",
            )
        )
    return checks


def run_battery(
    mask: Mask,
    level: int = DEFAULT_LEVEL,
    tolerance: float = 1e-8,
    *,
    exact: bool | None = None,
    interval: tuple[int, int] = (-1, 1),
) -> BatteryResult:
    """Run every verification check on one mask at the given resolution."""
    scale = build_scale_matrices(mask)
    spectral = eigen_structure(scale, exact=exact)
    phi = evaluate_phi(mask, level)
    basis = build_homogeneous_basis(spectral, level=level, interval=interval, phi=phi)
    checks = [
        _check_spectrum(scale, tolerance),
        _check_jordan(spectral, tolerance),
        _check_conventions(spectral),
        _check_extension(basis, tolerance),
        _check_homogeneity(basis, tolerance),
        _check_origin(basis, tolerance),
        _check_reconstruction(basis, tolerance),
        _check_accuracy(mask, spectral, phi, tolerance),
    ]
    checks.extend(_check_independence(mask, spectral, phi, level, tolerance))
    return BatteryResult(mask=mask, level=level, tolerance=tolerance, checks=tuple(checks))
