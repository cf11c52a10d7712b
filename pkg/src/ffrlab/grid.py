"""Complex-valued functions on the grid F_q^d and their Fourier analysis.

A function is stored as a flat complex vector of length q**d in canonical
order: the point ``(x_1, ..., x_d)`` sits at index ``sum(x_i * q**(d-i))``,
so ``x_1`` is the most significant digit and reshaping to ``(q,)*d`` puts
coordinate ``x_{i+1}`` on axis ``i``.

Two transforms are provided, matching the usual normalisations for
restriction theory over finite fields:

* ``fourier_forward``  : g-hat(x) = sum_m g(m) chi(-x.m)       (no scaling)
* ``fourier_inverse``  : f-vee(m) = q^-d sum_x f(x) chi(m.x)

so that ``fourier_inverse(fourier_forward(g)) == g``.  Both factor through a
single q x q character kernel applied along every grid axis (d matrix
multiplications instead of a q^d x q^d double sum), and complex64 input
stays complex64 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache

import numpy as np

from ffrlab.field import FiniteField


# --- coordinates ------------------------------------------------------------


def coords_to_index(field: FiniteField, coords: np.ndarray) -> np.ndarray:
    """Flat canonical index of points given as (..., d) coordinate arrays."""
    coords = np.asarray(coords)
    q, d = field.q, coords.shape[-1]
    out = np.zeros(coords.shape[:-1], dtype=np.int64)
    for i in range(d):
        out = out * q + coords[..., i]
    return out


def index_to_coords(field: FiniteField, d: int, idx: np.ndarray) -> np.ndarray:
    """Coordinates (..., d) of flat canonical indices."""
    idx = np.asarray(idx, dtype=np.int64)
    q = field.q
    out = np.empty(idx.shape + (d,), dtype=np.int64)
    for i in range(d - 1, -1, -1):
        out[..., i] = idx % q
        idx = idx // q
    return out


def all_coords(field: FiniteField, d: int) -> np.ndarray:
    """The (q**d, d) array of all grid points in canonical order."""
    return index_to_coords(field, d, np.arange(field.q**d))


# --- grid functions ---------------------------------------------------------


@dataclass
class GridFunction:
    """A complex function on F_q^d, flat values in canonical order."""

    field: FiniteField
    d: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if not np.issubdtype(self.values.dtype, np.complexfloating):
            self.values = self.values.astype(np.complex128)
        expected = self.field.q**self.d
        if self.values.shape != (expected,):
            raise ValueError(
                f"values must have shape ({expected},), got {self.values.shape}"
            )

    @property
    def size(self) -> int:
        return self.values.size

    def tensor(self) -> np.ndarray:
        """The values reshaped to (q,)*d, axis i carrying coordinate x_{i+1}."""
        return self.values.reshape((self.field.q,) * self.d)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return GridFunction(self.field, self.d, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return GridFunction(self.field, self.d, self.values - other.values)

    def __mul__(self, other) -> "GridFunction":
        if isinstance(other, GridFunction):
            self._check_compatible(other)
            return GridFunction(self.field, self.d, self.values * other.values)
        return GridFunction(self.field, self.d, self.values * other)

    __rmul__ = __mul__

    def conj(self) -> "GridFunction":
        return GridFunction(self.field, self.d, np.conj(self.values))

    def _check_compatible(self, other: "GridFunction") -> None:
        if self.field != other.field or self.d != other.d:
            raise ValueError("grid functions live on different grids")


def zero_function(field: FiniteField, d: int) -> GridFunction:
    return GridFunction(field, d, np.zeros(field.q**d, dtype=np.complex128))


def indicator(field: FiniteField, d: int, indices: np.ndarray) -> GridFunction:
    values = np.zeros(field.q**d, dtype=np.complex128)
    values[np.asarray(indices, dtype=np.int64)] = 1.0
    return GridFunction(field, d, values)


def point_mass(field: FiniteField, d: int, index: int, height: complex = 1.0) -> GridFunction:
    values = np.zeros(field.q**d, dtype=np.complex128)
    values[index] = height
    return GridFunction(field, d, values)


# --- character transforms ---------------------------------------------------


@lru_cache(maxsize=32)
def _character_kernel(field: FiniteField, forward: bool, single: bool) -> np.ndarray:
    """q x q symmetric kernel K[a, b] = chi(∓ a*b)."""
    K = field.char_table[field.mul_table]
    if forward:
        K = np.conj(K)
    return K.astype(np.complex64) if single else K


def _apply_kernel_all_axes(flat: np.ndarray, K: np.ndarray, q: int, d: int) -> np.ndarray:
    """Apply the symmetric kernel K along every grid axis of (B, q**d) data."""
    B = flat.shape[0]
    A = flat
    for k in range(d - 1):
        A = np.matmul(K, A.reshape(B * q**k, q, -1)).reshape(B, -1)
    A = (A.reshape(-1, q) @ K).reshape(B, -1)
    return A


def character_transform(
    field: FiniteField, d: int, values: np.ndarray, inverse: bool = False
) -> np.ndarray:
    """Raw transform on flat values, shape (q**d,) or (B, q**d).

    Forward maps g to sum_m g(m) chi(-x.m); inverse maps f to
    q^-d sum_x f(x) chi(m.x).  Complex64 input stays complex64.
    """
    values = np.asarray(values)
    if not np.issubdtype(values.dtype, np.complexfloating):
        values = values.astype(np.complex128)
    q = field.q
    batched = values.ndim == 2
    flat = values if batched else values[None, :]
    if flat.shape[-1] != q**d:
        raise ValueError(f"expected trailing dimension {q**d}, got {flat.shape}")
    single = values.dtype == np.complex64
    K = _character_kernel(field, forward=not inverse, single=single)
    out = _apply_kernel_all_axes(flat, K, q, d)
    if inverse:
        out = out * (1.0 / q**d)
    return out if batched else out[0]


def fourier_forward(g: GridFunction) -> GridFunction:
    """g-hat(x) = sum over m of g(m) chi(-x.m)."""
    return GridFunction(g.field, g.d, character_transform(g.field, g.d, g.values))


def fourier_inverse(f: GridFunction) -> GridFunction:
    """f-vee(m) = q^-d sum over x of f(x) chi(m.x)."""
    return GridFunction(
        f.field, f.d, character_transform(f.field, f.d, f.values, inverse=True)
    )


# --- measures ---------------------------------------------------------------


@dataclass(frozen=True)
class Measure:
    """A weighted counting measure on the grid.

    kind 'counting' weighs every point 1, 'normalized' weighs q^-d, and
    'surface' weighs 1/|support| on the given support and 0 elsewhere.
    """

    kind: str
    support: np.ndarray | None = dataclass_field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("counting", "normalized", "surface"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if (self.kind == "surface") != (self.support is not None):
            raise ValueError("surface measures need a support; others must not have one")

    def weights(self, field: FiniteField, d: int) -> np.ndarray:
        n = field.q**d
        if self.kind == "counting":
            return np.ones(n)
        if self.kind == "normalized":
            return np.full(n, 1.0 / n)
        w = np.zeros(n)
        w[self.support] = 1.0 / len(self.support)
        return w


COUNTING = Measure("counting")
NORMALIZED = Measure("normalized")


def surface_measure(support: np.ndarray) -> Measure:
    return Measure("surface", np.asarray(support, dtype=np.int64))


# --- norms and duality ------------------------------------------------------


def lp_norm(f: GridFunction, p: float, measure: Measure = COUNTING) -> float:
    """L^p norm of f with respect to the measure; p may be inf."""
    if p == np.inf:
        if measure.kind == "surface":
            vals = np.abs(f.values[measure.support])
        else:
            vals = np.abs(f.values)
        return float(vals.max()) if vals.size else 0.0
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    # Weight vectors are constant per kind, so the sums run without
    # materialising them; float64 accumulation keeps complex64 inputs honest.
    if measure.kind == "surface":
        vals = np.abs(f.values[measure.support])
        total = float(np.sum(vals**p, dtype=np.float64)) / len(measure.support)
        return float(total ** (1.0 / p))
    total = float(np.sum(np.abs(f.values) ** p, dtype=np.float64))
    if measure.kind == "normalized":
        total /= f.values.size
    return float(total ** (1.0 / p))


def inner_product(f: GridFunction, g: GridFunction, measure: Measure = COUNTING) -> complex:
    """<f, g> = sum w(x) f(x) conj(g(x))."""
    f._check_compatible(g)
    w = measure.weights(f.field, f.d)
    return complex(np.sum(w * f.values * np.conj(g.values)))


def holder_conjugate(p: float) -> float:
    if p == 1:
        return np.inf
    if p == np.inf:
        return 1.0
    return p / (p - 1.0)


def dual_norm(f: GridFunction, p: float, measure: Measure = COUNTING):
    """The norm ||f||_p realised through its extremal dual partner.

    Returns ``(value, g)`` where g has unit norm in the conjugate exponent
    (with respect to the same measure) and <f, g> = ||f||_p exactly; the
    zero function returns (0, zero).
    """
    if p != np.inf and p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    w = measure.weights(f.field, f.d)
    absf = np.abs(f.values)
    active = (w > 0) & (absf > 0)
    if not np.any(active):
        return 0.0, zero_function(f.field, f.d)
    g = np.zeros_like(f.values, dtype=np.complex128)
    if p == 1:
        g[active] = f.values[active] / absf[active]
        value = float(np.sum(w * absf))
    elif p == np.inf:
        idx_active = np.nonzero(active)[0]
        x0 = idx_active[np.argmax(absf[idx_active])]
        g[x0] = (f.values[x0] / absf[x0]) / w[x0]
        value = float(absf[x0])
    else:
        value = float(np.sum(w * absf**p) ** (1.0 / p))
        g[active] = absf[active] ** (p - 2) * f.values[active] / value ** (p - 1)
    return value, GridFunction(f.field, f.d, g)


# --- dyadic decomposition ----------------------------------------------------


@dataclass
class DyadicDecomposition:
    """Level sets of |g| at dyadic heights, down to height 2^-(L+1).

    Level i collects the points with scale * 2^-(i+1) < |g| <= scale * 2^-i,
    where scale = max |g|.  Points below the bottom threshold are discarded;
    the discarded mass is at most q^-1 times the scale.
    """

    field: FiniteField
    d: int
    scale: float
    depth: int
    level_indices: list[np.ndarray]
    phases: np.ndarray
    discarded_count: int
    discarded_mass: float
    max_pointwise_ratio: float

    def levels(self):
        """Yield (i, indices) for the nonempty levels."""
        for i, idx in enumerate(self.level_indices):
            if len(idx):
                yield i, idx

    def reconstruct(self) -> GridFunction:
        """Snap |g| up to its dyadic ceiling; within a factor 2 pointwise."""
        values = np.zeros(self.field.q**self.d, dtype=np.complex128)
        for i, idx in self.levels():
            values[idx] = self.scale * 2.0**-i * self.phases[idx]
        return GridFunction(self.field, self.d, values)


def dyadic_decompose(g: GridFunction, depth: int | None = None) -> DyadicDecomposition:
    """Decompose g into dyadic level sets of its modulus.

    The depth defaults to ceil((d+1) log2 q) so that everything discarded is
    below q^-(d+1) of the peak, hence its total mass is under q^-1 of the
    peak.  Raises on the zero function, which has no dyadic structure.
    """
    absg = np.abs(g.values)
    scale = float(absg.max())
    if scale == 0.0:
        raise ValueError("cannot dyadically decompose the zero function")
    q, d = g.field.q, g.d
    if depth is None:
        depth = int(np.ceil((d + 1) * np.log2(q)))
    rescaled = absg / scale
    keep = rescaled > 2.0 ** -(depth + 1)
    # floor(-log2 |g|); the epsilon keeps exact dyadic heights on their level
    level = np.zeros(len(absg), dtype=np.int64)
    level[keep] = np.floor(-np.log2(rescaled[keep]) + 1e-12).astype(np.int64)
    level = np.clip(level, 0, depth)
    phases = np.zeros(len(absg), dtype=np.complex128)
    phases[keep] = g.values[keep] / absg[keep]
    level_indices = [np.nonzero(keep & (level == i))[0] for i in range(depth + 1)]
    discarded = ~keep
    ratios = (2.0 ** -level[keep]) / rescaled[keep]
    return DyadicDecomposition(
        field=g.field,
        d=d,
        scale=scale,
        depth=depth,
        level_indices=level_indices,
        phases=phases,
        discarded_count=int(np.sum(discarded)),
        discarded_mass=float(np.sum(absg[discarded])),
        max_pointwise_ratio=float(ratios.max()) if ratios.size else 1.0,
    )


# --- serialization ------------------------------------------------------------


def save_grid_function_csv(g: GridFunction, path) -> None:
    """Write 'index,re,im' rows in canonical order."""
    data = np.column_stack([np.arange(g.size), g.values.real, g.values.imag])
    np.savetxt(path, data, fmt=["%d", "%.17g", "%.17g"], delimiter=",",
               header="index,re,im", comments="")


def load_grid_function_csv(field: FiniteField, d: int, path) -> GridFunction:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    values = np.zeros(field.q**d, dtype=np.complex128)
    idx = data[:, 0].astype(np.int64)
    values[idx] = data[:, 1] + 1j * data[:, 2]
    return GridFunction(field, d, values)


def save_grid_function_npy(g: GridFunction, path) -> None:
    np.save(path, g.values)


def load_grid_function_npy(field: FiniteField, d: int, path) -> GridFunction:
    return GridFunction(field, d, np.load(path))
