#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-numpy kernel backends.

Runs each hot kernel on a realistic workload with both implementations in
one process, checks they agree, and reports best-of-``--repeat`` wall times:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --level 18 --span 500000 --repeat 7

Compilation happens during a warm-up pass, so jit compile time is excluded
from the numbers. When numba is unavailable (or REFINABLE_NO_NUMBA is set)
only the numpy column is produced.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from refinable import kernels, mask_from_coefficients

_SQRT3 = np.sqrt(3.0)
D4 = [(1 + _SQRT3) / 4, (3 + _SQRT3) / 4, (3 - _SQRT3) / 4, (1 - _SQRT3) / 4]


def _cascade(refine, seed, coeffs, level):
    values = seed
    for j in range(level):
        values = refine(values, coeffs, 2**j)
    return values


def workloads(level: int, span: int):
    """(name, numpy callable, jit callable, result extractor) per kernel."""
    mask = mask_from_coefficients(D4, name="d4")
    coeffs = np.asarray(mask.coefficients, dtype=np.complex128)
    n = mask.n
    seed = np.arange(1.0, n + 2.0, dtype=np.complex128)
    no_prev = np.zeros(0, dtype=np.complex128)
    lam = 0.5
    limit = kernels.OVERFLOW_LIMIT

    def forward(kernel):
        buf = np.zeros(span, dtype=np.complex128)
        buf[: n + 1] = seed
        kernel(buf, 0, n + 1, span, coeffs, lam, no_prev, 0, limit)
        return buf

    def backward(kernel):
        buf = np.zeros(span + n + 1, dtype=np.complex128)
        buf[span:] = seed
        kernel(buf, -span, -span, 0, coeffs, lam, no_prev, 0, limit)
        return buf

    alpha = np.cos(np.arange(span) / 7.0).astype(np.complex128)
    alpha_lo = -(span // 2)
    out_lo = 2 * alpha_lo - n
    out_len = 2 * (alpha_lo + span) - 1 - out_lo

    jobs = [
        (
            f"refine_level (cascade to level {level})",
            lambda: _cascade(kernels.refine_level_numpy, seed, coeffs, level),
            lambda: _cascade(kernels._refine_level_jit, seed, coeffs, level),
        ),
        (
            f"extend_forward ({span} indices)",
            lambda: forward(kernels.extend_forward_numpy),
            lambda: forward(kernels._extend_forward_jit),
        ),
        (
            f"extend_backward ({span} indices)",
            lambda: backward(kernels.extend_backward_numpy),
            lambda: backward(kernels._extend_backward_jit),
        ),
        (
            f"subdivision_window ({out_len} outputs)",
            lambda: kernels.subdivision_numpy(alpha, alpha_lo, coeffs, out_lo, out_len),
            lambda: kernels._subdivision_jit(alpha, alpha_lo, coeffs, out_lo, out_len),
        ),
    ]
    if not kernels.USING_NUMBA:
        jobs = [(name, ref, None) for name, ref, _ in jobs]
    return jobs


def best_time(func, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--level", type=int, default=16, help="cascade depth")
    parser.add_argument("--span", type=int, default=200_000, help="extension length")
    parser.add_argument("--repeat", type=int, default=5, help="runs per timing")
    args = parser.parse_args()

    print(f"backend: numba={'on' if kernels.USING_NUMBA else 'off'}")
    header = f"{'kernel':<44}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, ref, jit in workloads(args.level, args.span):
        if jit is not None:
            got, want = jit(), ref()  # warm-up (compiles) + agreement check
            if not np.allclose(got, want, rtol=1e-12, atol=1e-12):
                raise SystemExit(f"{name}: backends disagree")
        t_ref = best_time(ref, args.repeat)
        if jit is None:
            print(f"{name:<44}{t_ref * 1e3:>9.2f} ms{'—':>12}{'—':>10}")
        else:
            t_jit = best_time(jit, args.repeat)
            print(
                f"{name:<44}{t_ref * 1e3:>9.2f} ms{t_jit * 1e3:>9.2f} ms"
                f"{t_ref / t_jit:>9.1f}x"
            )


if __name__ == "__main__":
    main()
