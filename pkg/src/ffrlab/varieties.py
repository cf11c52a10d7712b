"""Quadratic varieties in F_q^d: spheres, paraboloids, and their Fourier data.

The sphere of radius j is ``{x : x_1^2 + ... + x_d^2 = j}`` and the
paraboloid is the graph ``{x : x_d = x_1^2 + ... + x_{d-1}^2}``.  Both are
enumerated by a full scan of the grid; closed-form point counts and the
explicit formula for the inverse Fourier transform of a sphere indicator are
provided separately so that the two routes can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ffrlab.field import FiniteField
from ffrlab.grid import GridFunction, Measure, character_transform, index_to_coords, surface_measure


class BranchUnavailableError(ValueError):
    """A closed-form branch was requested outside its hypotheses."""


@lru_cache(maxsize=8)
def norm_values(field: FiniteField, d: int) -> np.ndarray:
    """The field element x_1^2 + ... + x_d^2 at every grid point (int32)."""
    q = field.q
    squares = field.mul_table[np.arange(q), np.arange(q)].astype(np.int32)
    norms = squares.copy()
    for _ in range(d - 1):
        norms = field.add_table[norms[:, None], squares[None, :]].ravel().astype(np.int32)
    return norms


@dataclass
class QuadraticVariety:
    """A sphere or paraboloid, held as sorted flat point indices."""

    kind: str
    field: FiniteField
    d: int
    j: int
    points: np.ndarray
    degenerate: bool = False

    @property
    def size(self) -> int:
        return len(self.points)

    def coords(self) -> np.ndarray:
        return index_to_coords(self.field, self.d, self.points)

    def indicator(self) -> GridFunction:
        values = np.zeros(self.field.q**self.d, dtype=np.complex128)
        values[self.points] = 1.0
        return GridFunction(self.field, self.d, values)

    def measure(self) -> Measure:
        return surface_measure(self.points)

    def __repr__(self) -> str:
        tag = f", j={self.j}" if self.kind == "sphere" else ""
        return (
            f"QuadraticVariety({self.kind}{tag}, q={self.field.q}, d={self.d}, "
            f"|V|={self.size})"
        )


def sphere(field: FiniteField, d: int, j: int) -> QuadraticVariety:
    """The sphere of radius j, enumerated by scanning the grid."""
    if d < 2:
        raise ValueError("spheres need dimension d >= 2")
    j = int(j) % field.q
    points = np.nonzero(norm_values(field, d) == j)[0]
    degenerate = (
        j == 0 and d == 2 and field.quadratic_character(field.neg(1)) == -1
    )
    return QuadraticVariety("sphere", field, d, j, points, degenerate)


def paraboloid(field: FiniteField, d: int) -> QuadraticVariety:
    """The paraboloid x_d = |x'|^2; a graph, so exactly q^(d-1) points."""
    if d < 2:
        raise ValueError("paraboloids need dimension d >= 2")
    q = field.q
    prefix_norms = norm_values(field, d - 1).astype(np.int64)
    points = np.arange(q ** (d - 1), dtype=np.int64) * q + prefix_norms
    return QuadraticVariety("paraboloid", field, d, 0, points)


def sphere_cardinality(field: FiniteField, d: int, j: int) -> int:
    """Closed-form |S_j| for the diagonal quadric of full rank d."""
    q = field.q
    eta = field.quadratic_character
    if d % 2 == 1:
        if j == 0:
            return q ** (d - 1)
        sign_arg = field.mul(field.pow(field.neg(1), (d - 1) // 2), j)
        return q ** (d - 1) + q ** ((d - 1) // 2) * int(eta(sign_arg))
    disc = field.pow(field.neg(1), d // 2)
    if j == 0:
        return q ** (d - 1) + (q - 1) * q ** ((d - 2) // 2) * int(eta(disc))
    return q ** (d - 1) - q ** ((d - 2) // 2) * int(eta(disc))


def sphere_fourier_explicit(field: FiniteField, d: int, j: int) -> GridFunction:
    """Closed form for (1_{S_j})-vee via completed Gauss sums.

    For each m,
      (1_{S_j})-vee(m) = q^-1 [m = 0]
        + q^(-d-1) G^d sum_{r != 0} eta(r)^d chi(-r j - |m|^2 / (4r)),
    where G is the Gauss sum and |m|^2 = m_1^2 + ... + m_d^2.  The r-sum is
    precomputed per value of |m|^2, so the whole grid costs O(q^2 + q^d).
    """
    q = field.q
    r = np.arange(1, q)
    eta_pow = field.eta_table[r].astype(np.float64) if d % 2 == 1 else np.ones(q - 1)
    four = field.element(4)
    inv_4r = field.inv(field.mul(four, r))
    minus_rj = field.neg(field.mul(r, j))
    v = np.arange(q)
    # phase argument for every (v, r): -r j - v/(4r)
    args = field.sub(minus_rj[None, :], field.mul(v[:, None], inv_4r[None, :]))
    r_sums = np.sum(eta_pow[None, :] * field.char_table[args], axis=1)
    Gd = field.gauss_sum_explicit() ** d
    values = (Gd / q ** (d + 1)) * r_sums[norm_values(field, d).astype(np.int64)]
    values = values.astype(np.complex128)
    values[0] += 1.0 / q
    return GridFunction(field, d, values)


def zero_sphere_fourier(field: FiniteField, d: int) -> GridFunction:
    """Elementary form of (1_{S_0})-vee when d = 2 mod 4 and q = 3 mod 4.

    Under those hypotheses G^d = -q^(d/2) and the radius-0 sum collapses to
      (1_{S_0})-vee(m) = q^-1 [m = 0] - q^(-(d+2)/2) sum_{s != 0} chi(s |m|^2),
    which is q^(-(d+2)/2) when |m|^2 != 0 and -(q-1) q^(-(d+2)/2) on the
    rest of the null cone.  Outside the hypotheses this raises
    BranchUnavailableError; use sphere_fourier_explicit instead.
    """
    q = field.q
    if d % 4 != 2:
        raise BranchUnavailableError(f"d = {d} is not 2 mod 4")
    if q % 4 != 3:
        raise BranchUnavailableError(f"q = {q} is not 3 mod 4")
    norms = norm_values(field, d)
    scale = float(q) ** (-(d + 2) / 2)
    values = np.where(norms != 0, scale, -(q - 1) * scale).astype(np.complex128)
    values[0] += 1.0 / q
    return GridFunction(field, d, values)


def surface_extension(
    V: QuadraticVariety, f: GridFunction | None = None, single: bool = False
) -> GridFunction:
    """(f dsigma)-vee(m) = |V|^-1 sum_{x in V} f(x) chi(m.x).

    With f omitted this is the inverse transform of the normalised surface
    measure itself.  Implemented as the grid inverse transform of
    (q^d / |V|) f 1_V, so it exercises the same transform core as everything
    else.  ``single`` switches the big transform to complex64.
    """
    field, d = V.field, V.d
    n = field.q**d
    dtype = np.complex64 if single else np.complex128
    lifted = np.zeros(n, dtype=dtype)
    weight = n / V.size
    if f is None:
        lifted[V.points] = weight
    else:
        lifted[V.points] = np.asarray(f.values[V.points], dtype=dtype) * dtype(weight)
    return GridFunction(field, d, character_transform(field, d, lifted, inverse=True))


@dataclass
class DecayReport:
    """Worst off-origin value of (dsigma)-vee against the expected scale."""

    kind: str
    q: int
    d: int
    j: int
    max_off_zero: float
    benchmark: float
    ratio: float
    degenerate: bool


def decay_profile(V: QuadraticVariety) -> DecayReport:
    """Compare max_{m != 0} |(dsigma)-vee(m)| with its generic decay rate.

    Benchmarks: q^(-(d-1)/2) for odd-dimensional spheres and the paraboloid,
    q^(-(d-2)/2) for even-dimensional spheres (whose null cone slows decay).
    A degenerate variety (the one-point sphere) reports ratio against the
    same benchmark but is flagged; its transform is identically 1.
    """
    field, d, q = V.field, V.d, V.field.q
    ext = surface_extension(V)
    off = np.abs(ext.values)
    off[0] = 0.0
    max_off = float(off.max())
    if V.kind == "sphere" and d % 2 == 0:
        benchmark = float(q) ** (-(d - 2) / 2)
    else:
        benchmark = float(q) ** (-(d - 1) / 2)
    return DecayReport(
        kind=V.kind,
        q=q,
        d=d,
        j=V.j,
        max_off_zero=max_off,
        benchmark=benchmark,
        ratio=max_off / benchmark,
        degenerate=V.degenerate,
    )
