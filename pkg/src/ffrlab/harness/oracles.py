"""Slow, independent evaluators the suites cross-check against.

These never factor the transform axis-by-axis and never reuse the analytic
formulas: each value is a single flat character sum evaluated directly, so
agreement with the fast paths is evidence, not circularity.
"""

from __future__ import annotations

import numpy as np

from ffrlab.field import FiniteField
from ffrlab.grid import all_coords
from ffrlab.varieties import QuadraticVariety


def inverse_transform_direct(field: FiniteField, d: int, support: np.ndarray,
                             weights: np.ndarray | None = None) -> np.ndarray:
    """f-vee(m) = q^-d sum_x f(x) chi(m.x) for f = weights on support.

    Chunked direct summation over the support; for prime fields the dot
    products run through integer matmul, otherwise through field tables.
    """
    q, n = field.q, field.q**d
    grid = all_coords(field, d)
    coords_s = grid[support]
    if weights is None:
        weights = np.ones(len(support), dtype=np.complex128)
    weights = np.asarray(weights, dtype=np.complex128)
    out = np.empty(n, dtype=np.complex128)
    budget = 8_000_000 if field.ell == 1 else 2_000_000 // max(1, d)
    chunk = max(1, budget // max(1, len(support)))
    for start in range(0, n, chunk):
        block = grid[start:start + chunk]
        if field.ell == 1:
            dots = (block.astype(np.int64) @ coords_s.T.astype(np.int64)) % q
        else:
            dots = field.dot(block[:, None, :], coords_s[None, :, :])
        out[start:start + chunk] = field.char_table[dots] @ weights
    return out / n


def sphere_brute_counts(field: FiniteField, d: int) -> np.ndarray:
    """|S_j| for every j by direct enumeration of all q^d norms."""
    coords = all_coords(field, d)
    norms = field.dot(coords, coords)
    return np.bincount(norms, minlength=field.q)


def extension_direct(field: FiniteField, V: QuadraticVariety,
                     values_on_V: np.ndarray) -> np.ndarray:
    """(f dsigma)-vee by direct summation over the variety's points."""
    scaled = np.asarray(values_on_V, dtype=np.complex128) * (field.q**V.d / V.size)
    return inverse_transform_direct(field, V.d, V.points, scaled)
