"""Two-sided sequences: lazy windows, subdivision, and eigen-extension.

A mask defines the bi-infinite subdivision operator (Y L)_n = sum_i Y_i
c_{2i-n}. Finite eigenvector (or Jordan chain) data for the (N+1)x(N+1)
scale matrix extends uniquely to a two-sided sequence satisfying
Y L = lambda Y + Y_prev: entries beyond the initial window follow a
recurrence that only looks at already-known entries, in both directions.
Because the dependency is dyadic (entry n needs entries near n/2), the
extension grows polynomially, like n^(log2(1/|lambda|)), not geometrically.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from . import kernels
from .diffeq import difference_system, solve_system
from .errors import ExtensionError, ExtensionOverflowError
from .mask import Mask, ScaleMatrices, build_scale_matrices, mask_polynomials

PRECONDITION_RTOL = 1e-8


class ZeroExtender:
    """Extends by zeros (finitely supported sequences)."""

    def fill(self, buf, buf_lo, old_lo, old_hi, new_lo, new_hi):
        pass  # buffer is zero-initialized


class RuleExtender:
    """Extends by evaluating a closed-form rule (``rule.values(lo, hi)``)."""

    def __init__(self, rule):
        self.rule = rule

    def fill(self, buf, buf_lo, old_lo, old_hi, new_lo, new_hi):
        if new_lo < old_lo:
            buf[new_lo - buf_lo : old_lo - buf_lo] = self.rule.values(new_lo, old_lo)
        if new_hi > old_hi:
            buf[old_hi - buf_lo : new_hi - buf_lo] = self.rule.values(old_hi, new_hi)


class EigenExtender:
    """Extends by the recurrence Y L = lambda Y + Y_prev.

    For n outside [0, N] the relation (Y L)_n = lambda Y_n + Y_prev_n
    involves Y only at indices i in [ceil(n/2), floor((n+N)/2)], all of which
    lie strictly between n and the initial window, so each new entry is
    determined by known ones: ascending for n >= N+1, descending for n <= -1.
    """

    def __init__(self, mask: Mask, eigenvalue: complex, prev: "SequenceWindow | None"):
        self.mask = mask
        self.eigenvalue = complex(eigenvalue)
        self.prev = prev

    def fill(self, buf, buf_lo, old_lo, old_hi, new_lo, new_hi):
        coeffs = self.mask.coefficients
        lam = self.eigenvalue
        if new_hi > old_hi:
            if self.prev is not None:
                prev_vals = self.prev.values(old_hi, new_hi)
            else:
                prev_vals = np.zeros(new_hi - old_hi, dtype=complex)
            stop = kernels.extend_forward(
                buf, buf_lo, old_hi, new_hi, coeffs, lam, prev_vals, old_hi, kernels.OVERFLOW_LIMIT
            )
            if stop != new_hi:
                raise ExtensionOverflowError(
                    f"extension exceeded {kernels.OVERFLOW_LIMIT:g} at index {stop}", index=stop
                )
        if new_lo < old_lo:
            if self.prev is not None:
                prev_vals = self.prev.values(new_lo, old_lo)
            else:
                prev_vals = np.zeros(old_lo - new_lo, dtype=complex)
            stop = kernels.extend_backward(
                buf, buf_lo, new_lo, old_lo, coeffs, lam, prev_vals, new_lo, kernels.OVERFLOW_LIMIT
            )
            if stop != new_lo - 1:
                raise ExtensionOverflowError(
                    f"extension exceeded {kernels.OVERFLOW_LIMIT:g} at index {stop}", index=stop
                )


class SequenceWindow:
    """A two-sided complex sequence, materialized on [lo, hi).

    ``ensure`` grows the window in place through the attached extender (zeros
    by default); reads outside the window trigger growth. Growth holds an
    internal lock, so concurrent reads are safe; extenders may recursively
    grow their ``prev`` window (the chain is acyclic, so lock order is fixed).
    """

    def __init__(self, values, lo=0, extender=None, name=None):
        buf = np.array(values, dtype=complex)
        if buf.ndim != 1 or buf.size == 0:
            raise ExtensionError("a sequence window needs a nonempty 1-d value block")
        self._buf = buf
        self._lo = int(lo)
        self._extender = extender if extender is not None else ZeroExtender()
        self._lock = threading.RLock()
        self.name = name

    @property
    def lo(self) -> int:
        return self._lo

    @property
    def hi(self) -> int:
        return self._lo + len(self._buf)

    def ensure(self, lo: int, hi: int) -> None:
        """Materialize at least [lo, hi)."""
        if lo >= hi:
            return
        with self._lock:
            new_lo = min(lo, self._lo)
            new_hi = max(hi, self.hi)
            if new_lo == self._lo and new_hi == self.hi:
                return
            old_lo, old_hi = self._lo, self.hi
            buf = np.zeros(new_hi - new_lo, dtype=complex)
            buf[old_lo - new_lo : old_hi - new_lo] = self._buf
            self._extender.fill(buf, new_lo, old_lo, old_hi, new_lo, new_hi)
            self._buf = buf
            self._lo = new_lo

    def value(self, k: int) -> complex:
        self.ensure(k, k + 1)
        return complex(self._buf[k - self._lo])

    def values(self, lo: int, hi: int) -> np.ndarray:
        if lo >= hi:
            return np.zeros(0, dtype=complex)
        self.ensure(lo, hi)
        return self._buf[lo - self._lo : hi - self._lo].copy()

    def window(self):
        """(lo, hi, values) of the currently materialized block."""
        with self._lock:
            return self._lo, self.hi, self._buf.copy()

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"<SequenceWindow{tag} [{self.lo}, {self.hi})>"


def sequence_window(values, lo=0, name=None) -> SequenceWindow:
    """A finitely supported sequence: given values, zeros elsewhere."""
    return SequenceWindow(values, lo=lo, name=name)


def restrict(y, mask: Mask, which: str = "full") -> np.ndarray:
    """Samples of a sequence on the mask's support window.

    ``full``  -> (Y_0, ..., Y_N); ``middle`` -> (Y_1, ..., Y_{N-1}).
    """
    n = mask.n
    if which == "full":
        lo, hi = 0, n + 1
    elif which == "middle":
        lo, hi = 1, n
    else:
        raise ValueError(f"unknown restriction {which!r} (use 'full' or 'middle')")
    if isinstance(y, SequenceWindow):
        return y.values(lo, hi)
    arr = np.asarray(y, dtype=complex)
    if arr.size < hi:
        raise ExtensionError("sample block too short for the requested restriction")
    return arr[lo:hi].copy()


# ---------------------------------------------------------------------------
# subdivision

def subdivision(alpha, mask: Mask, out_window=None) -> SequenceWindow:
    """Apply the subdivision operator: out_j = sum_i alpha_i c_{2i-j}.

    ``alpha`` (a SequenceWindow, or an array starting at index 0) is treated
    as finitely supported by its materialized block; the output is then
    supported inside [2*lo - N, 2*hi - 1), which is the default out window.
    """
    if isinstance(alpha, SequenceWindow):
        a_lo, a_hi, a_vals = alpha.window()
    else:
        a_vals = np.asarray(alpha, dtype=complex)
        a_lo, a_hi = 0, len(a_vals)
    support_lo = 2 * a_lo - mask.n
    support_hi = 2 * (a_hi - 1) + 1
    if out_window is None:
        out_lo, out_hi = support_lo, support_hi
    else:
        out_lo, out_hi = int(out_window[0]), int(out_window[1])
    out = kernels.subdivision_window(a_vals, a_lo, mask.coefficients, out_lo, out_hi - out_lo)
    return SequenceWindow(out, lo=out_lo, name="subdivision")


# ---------------------------------------------------------------------------
# eigen-extension

def eigen_extend(
    v,
    chain_prev: SequenceWindow | None,
    mask: Mask,
    eigenvalue: complex,
    out_window=None,
    *,
    scale: ScaleMatrices | None = None,
    rtol: float = PRECONDITION_RTOL,
) -> SequenceWindow:
    """Extend scale-matrix chain data v to a two-sided Y with Y L = lam Y + Y_prev.

    ``v`` is a left chain vector of the scale matrix: v (T - lam I) must equal
    the restriction of ``chain_prev`` to [0, N] (the zero sequence for an
    eigenvector). On that window the recurrence *is* the matrix identity, so
    the precondition is exactly what makes the extension exist; it is then
    unique because every outside entry is forced.
    """
    lam = complex(eigenvalue)
    if lam == 0:
        raise ExtensionError("zero eigenvalues do not extend (recurrence divides by lambda)")
    if scale is None:
        scale = build_scale_matrices(mask)
    n = mask.n
    v = np.asarray(v, dtype=complex)
    if v.shape != (n + 1,):
        raise ExtensionError(f"chain data must have length N+1 = {n + 1}, got {v.shape}")
    if chain_prev is None:
        prev_block = np.zeros(n + 1, dtype=complex)
    else:
        prev_block = chain_prev.values(0, n + 1)
    residual = v @ scale.shifted(lam) - prev_block
    tol = rtol * max(
        1.0,
        float(np.abs(v).max(initial=0.0)),
        float(np.abs(prev_block).max(initial=0.0)),
    )
    worst = float(np.abs(residual).max(initial=0.0))
    if worst > tol:
        raise ExtensionError(
            f"chain data does not satisfy v (T - lambda I) = prev (residual {worst:.3g})"
        )
    window = SequenceWindow(
        v, lo=0, extender=EigenExtender(mask, lam, chain_prev), name="eigen-extension"
    )
    if out_window is not None:
        window.ensure(int(out_window[0]), int(out_window[1]))
    return window


# ---------------------------------------------------------------------------
# kernel of the bi-infinite subdivision matrix

@dataclass(frozen=True)
class SubdivisionKernel:
    """Basis of { Y : Y L = 0 }, one window per fundamental sequence."""

    windows: tuple[SequenceWindow, ...]
    rules: tuple
    gcd_degree: int

    @property
    def dimension(self) -> int:
        return len(self.windows)


def kernel_of_L(mask: Mask, initial_window=None) -> SubdivisionKernel:
    """Solve Y L = 0: even rows give sum_t Y_{m+t} c_{2t} = 0 and odd rows
    sum_t Y_{m+t} c_{2t+1} = 0, so the kernel is the common solution space of
    the two difference equations — the fundamental sequences of the gcd of
    the even and odd mask polynomials. An identically zero polynomial
    constrains nothing and is dropped.
    """
    polys = mask_polynomials(mask)
    equations = []
    for part in (polys.exact_even or polys.even, polys.exact_odd or polys.odd):
        coeffs = list(part)
        if any(c != 0 for c in coeffs):
            equations.append(coeffs)
    system = difference_system(equations)
    basis = solve_system(system)
    lo, hi = (0, mask.n + 1) if initial_window is None else initial_window
    windows = []
    for rule in basis.rules:
        win = SequenceWindow(
            rule.values(lo, hi), lo=lo, extender=RuleExtender(rule), name="kernel"
        )
        windows.append(win)
    return SubdivisionKernel(
        windows=tuple(windows), rules=basis.rules, gcd_degree=system.gcd_degree
    )
