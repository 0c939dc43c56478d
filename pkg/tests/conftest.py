"""Shared corpus: four worked masks plus seeded random masks.

Random masks normalize the even- and odd-indexed coefficient sums to 1
separately, which guarantees eigenvalue 1 of the scale matrix (column
sums are 1) and hence a well-defined refinable function.
"""

from __future__ import annotations

import numpy as np
import pytest

import refinable as rf

SEED = 20260814

SQRT3 = np.sqrt(3.0)

D4_COEFFS = [(1 + SQRT3) / 4, (3 + SQRT3) / 4, (3 - SQRT3) / 4, (1 - SQRT3) / 4]

CORPUS_SPECS = {
    "bspline3": ["1/4", "3/4", "3/4", "1/4"],
    "d4": D4_COEFFS,
    "jordan13": ["1/3", "2/3", "2/3", "1/3"],
    "half": ["1/2", "1/2", "1/2", "1/2"],
    "haar": [1, 1],
}


def make_mask(name: str) -> rf.Mask:
    return rf.mask_from_coefficients(CORPUS_SPECS[name], name=name)


def _draw_coefficients(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        c = rng.normal(size=n + 1)
        even, odd = c[0::2].sum(), c[1::2].sum()
        if min(abs(even), abs(odd)) < 0.2:
            continue
        c[0::2] /= even
        c[1::2] /= odd
        if min(abs(c[0]), abs(c[n])) < 0.05 or np.abs(c).max() > 20:
            continue
        return c


def random_masks(count: int = 50) -> list[rf.Mask]:
    rng = np.random.default_rng(SEED)
    masks = []
    for i in range(count):
        n = 1 + i % 9
        coeffs = _draw_coefficients(rng, n)
        masks.append(rf.mask_from_coefficients(list(coeffs), name=f"rnd{i:02d}_n{n}"))
    return masks


@pytest.fixture(scope="session")
def corpus() -> dict[str, rf.Mask]:
    return {name: make_mask(name) for name in CORPUS_SPECS}


@pytest.fixture(scope="session")
def all_masks(corpus) -> list[rf.Mask]:
    return list(corpus.values()) + random_masks()


@pytest.fixture(scope="session")
def pipeline():
    """Memoized (scale, spectral, phi, basis) per mask/level/interval."""
    cache: dict = {}

    def get(mask: rf.Mask, level: int = 8, interval: tuple[int, int] = (-1, 1)):
        key = (mask.name, level, interval)
        if key not in cache:
            scale = rf.build_scale_matrices(mask)
            spectral = rf.eigen_structure(scale)
            phi = rf.evaluate_phi(mask, level)
            basis = rf.build_homogeneous_basis(
                spectral, level=level, interval=interval, phi=phi
            )
            cache[key] = (scale, spectral, phi, basis)
        return cache[key]

    return get
