"""Mask parsing and validation, scale matrices, and the even/odd polynomials.

A mask is the finite coefficient list c_0..c_N of a two-scale refinement
equation phi(x) = sum_k c_k phi(2x - k); c_0 and c_N must be nonzero so the
support of phi is exactly [0, N]. The scale matrix T = (c_{2i-j}) and its
head/tail/core submatrices drive everything downstream.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import MaskError
from . import exact as xq


class MaskSumWarning(UserWarning):
    """Coefficients do not sum to 2 (the usual integrable normalization)."""


@dataclass(frozen=True)
class Mask:
    """Validated refinement coefficients c_0..c_N.

    ``exact`` holds Fractions when every coefficient was given exactly
    (integers or 'p/q' strings); floats never count as exact input.
    """

    coefficients: np.ndarray
    exact: tuple[Fraction, ...] | None = None
    name: str | None = None

    @property
    def n(self) -> int:
        """Support degree N; supp phi = [0, N]."""
        return len(self.coefficients) - 1

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def c(self, k: int) -> complex:
        """Coefficient c_k with the convention c_k = 0 outside 0..N."""
        if 0 <= k <= self.n:
            return complex(self.coefficients[k])
        return 0.0 + 0.0j

    def exact_c(self, k: int) -> Fraction:
        if self.exact is None:
            raise MaskError("mask has no exact rational representation")
        if 0 <= k <= self.n:
            return self.exact[k]
        return Fraction(0)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<Mask{label} N={self.n} rational={self.is_rational}>"


def mask_from_coefficients(values, name=None) -> Mask:
    """Build a validated mask from numbers, Fractions, or 'p/q' strings."""
    values = list(values)
    if len(values) < 2:
        raise MaskError("mask needs at least two coefficients (N >= 1)")
    floats = np.zeros(len(values), dtype=complex)
    exacts: list[Fraction] | None = []
    for i, v in enumerate(values):
        if isinstance(v, bool):
            raise MaskError(f"coefficient {i} is a boolean, not a number")
        if isinstance(v, (int, Fraction)):
            f = Fraction(v)
            floats[i] = float(f)
            if exacts is not None:
                exacts.append(f)
        elif isinstance(v, str):
            try:
                f = Fraction(v)
            except (ValueError, ZeroDivisionError) as e:
                raise MaskError(f"coefficient {i}: malformed rational string {v!r}") from e
            floats[i] = float(f)
            if exacts is not None:
                exacts.append(f)
        elif isinstance(v, float):
            if not np.isfinite(v):
                raise MaskError(f"coefficient {i} is not finite")
            floats[i] = v
            exacts = None
        elif isinstance(v, complex):
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise MaskError(f"coefficient {i} is not finite")
            floats[i] = v
            exacts = None
        else:
            raise MaskError(f"coefficient {i} has unsupported type {type(v).__name__}")
    if floats[0] == 0:
        raise MaskError("c_0 must be nonzero (support assumption)")
    if floats[-1] == 0:
        raise MaskError("c_N must be nonzero (support assumption)")
    total = floats.sum()
    if exacts is not None:
        off = sum(exacts) != 2
    else:
        off = abs(total - 2.0) > 1e-12
    if off:
        warnings.warn(
            f"mask coefficients sum to {total:.6g}, not 2; continuing (scale is a free choice)",
            MaskSumWarning,
            stacklevel=2,
        )
    floats.setflags(write=False)
    return Mask(
        coefficients=floats,
        exact=tuple(exacts) if exacts is not None else None,
        name=name,
    )


def parse_mask(source) -> Mask:
    """Parse a mask document: {"name": str?, "coefficients": [num | "p/q", ...]}.

    ``source`` may be the JSON text (str/bytes) or an already-decoded dict.
    Plain JSON numbers are IEEE doubles (integers stay exact); 'p/q' strings
    parse as exact rationals.
    """
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as e:
            raise MaskError(f"mask document is not valid JSON: {e}") from e
    elif isinstance(source, dict):
        doc = source
    else:
        raise MaskError(f"unsupported mask source type {type(source).__name__}")
    if not isinstance(doc, dict):
        raise MaskError("mask document must be a JSON object")
    if "coefficients" not in doc:
        raise MaskError("mask document is missing the 'coefficients' array")
    coeffs = doc["coefficients"]
    if not isinstance(coeffs, list) or not coeffs:
        raise MaskError("'coefficients' must be a non-empty array")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise MaskError("'name' must be a string when present")
    return mask_from_coefficients(coeffs, name=name)


@dataclass(frozen=True)
class ScaleMatrices:
    """The scale matrix T[i][j] = c_{2i-j} and its principal submatrices.

    ``head`` uses indices 0..N-1, ``tail`` 1..N, ``core`` 1..N-1 (0x0 when
    N = 1). First row of T is (c_0, 0, ..), last row (.., 0, c_N), so the
    spectrum of T is {c_0, c_N} plus the spectrum of the core.
    """

    mask: Mask
    full: np.ndarray
    head: np.ndarray
    tail: np.ndarray
    core: np.ndarray
    exact_full: tuple[tuple[Fraction, ...], ...] | None = None

    @property
    def n(self) -> int:
        return self.mask.n

    def exact_rows(self):
        if self.exact_full is None:
            raise MaskError("mask has no exact rational representation")
        return [list(row) for row in self.exact_full]

    def exact_core_rows(self):
        rows = self.exact_rows()
        return [row[1:-1] for row in rows[1:-1]]

    def shifted(self, lam: complex) -> np.ndarray:
        """T - lam*I."""
        return self.full - lam * np.eye(self.n + 1, dtype=complex)


def build_scale_matrices(mask: Mask) -> ScaleMatrices:
    n = mask.n
    full = np.zeros((n + 1, n + 1), dtype=complex)
    for i in range(n + 1):
        for j in range(n + 1):
            k = 2 * i - j
            if 0 <= k <= n:
                full[i, j] = mask.coefficients[k]
    exact_full = None
    if mask.is_rational:
        exact_full = tuple(
            tuple(mask.exact_c(2 * i - j) for j in range(n + 1)) for i in range(n + 1)
        )
    full.setflags(write=False)
    return ScaleMatrices(
        mask=mask,
        full=full,
        head=full[:n, :n],
        tail=full[1:, 1:],
        core=full[1:n, 1:n],
        exact_full=exact_full,
    )


@dataclass(frozen=True)
class MaskPolynomials:
    """Even/odd coefficient split: even[k] = c_{2k}, odd[k] = c_{2k+1}.

    Arrays are nominal (untrimmed); trimmed degrees drop trailing zero
    coefficients. For odd N both nominal degrees equal (N-1)/2.
    """

    even: np.ndarray
    odd: np.ndarray
    exact_even: tuple[Fraction, ...] | None = None
    exact_odd: tuple[Fraction, ...] | None = None

    @property
    def nominal_even_degree(self) -> int:
        return len(self.even) - 1

    @property
    def nominal_odd_degree(self) -> int:
        return len(self.odd) - 1

    @property
    def even_trimmed_degree(self) -> int:
        return _trimmed_degree(self.even)

    @property
    def odd_trimmed_degree(self) -> int:
        return _trimmed_degree(self.odd)


def _trimmed_degree(arr) -> int:
    n = len(arr)
    while n > 0 and arr[n - 1] == 0:
        n -= 1
    return n - 1


def mask_polynomials(mask: Mask) -> MaskPolynomials:
    even = np.ascontiguousarray(mask.coefficients[0::2])
    odd = np.ascontiguousarray(mask.coefficients[1::2])
    even.setflags(write=False)
    odd.setflags(write=False)
    exact_even = exact_odd = None
    if mask.is_rational:
        exact_even = mask.exact[0::2]
        exact_odd = mask.exact[1::2]
    return MaskPolynomials(even=even, odd=odd, exact_even=exact_even, exact_odd=exact_odd)
