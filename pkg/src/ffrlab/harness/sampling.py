"""Deterministic samplers: random point sets, witness sets, test functions.

Every random draw flows from a SeedSequence keyed on (seed, suite, q, tag),
so batches are identical across runs and independent of worker scheduling.
"""

from __future__ import annotations

import zlib

import numpy as np

from ffrlab.field import FiniteField
from ffrlab.grid import GridFunction, indicator
from ffrlab.subspaces import (
    AffineSubspace,
    BranchUnavailableError,
    isotropic_directions,
    isotropic_hyperplane_section,
    isotropic_line_cosets,
    mutually_orthogonal_witness,
    sphere_affine_subspace,
    witt_index,
    witt_isotropic_subspace,
)
from ffrlab.varieties import QuadraticVariety


def spawn_rng(seed: int, *tags) -> np.random.Generator:
    """Deterministic child generator for a (suite, q, case...) tag tuple."""
    words = [zlib.crc32(str(t).encode()) for t in tags]
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + words))


def regime_sizes(lower: float, upper: float, count: int, rng: np.random.Generator,
                 cap: int) -> list[int]:
    """Log-uniform integer sizes in [lower, upper], clipped to [1, cap]."""
    lo = max(1.0, lower)
    hi = max(lo, min(float(upper), float(cap)))
    draws = np.exp(rng.uniform(np.log(lo), np.log(hi), size=count))
    return [int(np.clip(round(s), 1, cap)) for s in draws]


def sample_subsets(V: QuadraticVariety, sizes, count: int, seed: int,
                   suite: str = "adhoc") -> list[tuple[str, np.ndarray]]:
    """``count`` uniform without-replacement draws per size, witnesses first.

    The deterministic witness sets that the inequalities are sharp against
    (isotropic subspace through the origin on the zero sphere; affine
    subspace and the mutually-orthogonal coset on nonzero spheres) are
    injected into every batch, ahead of the random draws.
    """
    rng = spawn_rng(seed, suite, V.field.q, V.d, V.j, "subsets")
    out = list(witness_sets(V))
    for size in sizes:
        size = int(size)
        if size > V.size:
            raise ValueError(f"requested size {size} exceeds |V| = {V.size}")
        for i in range(count):
            draw = np.sort(rng.choice(V.points, size=size, replace=False))
            out.append((f"random[{size}]#{i}", draw))
    return out


def witness_sets(V: QuadraticVariety) -> list[tuple[str, np.ndarray]]:
    """Structured subsets of V driving the sharpness checks."""
    field, d, j = V.field, V.d, V.j
    out: list[tuple[str, np.ndarray]] = [
        ("singleton", V.points[:1]),
        ("full", V.points),
    ]
    if V.kind != "sphere" or d % 2 or d < 4:
        return out
    if j == 0:
        basis = witt_isotropic_subspace(field, d)
        if len(basis):
            pts = AffineSubspace(field, basis, np.zeros(d, dtype=np.int64)).point_indices()
            out.append((f"isotropic-subspace[{len(pts)}]", np.sort(pts)))
    else:
        try:
            aff = sphere_affine_subspace(field, d, j)
            out.append((f"affine-subspace[{field.q ** aff.dim}]",
                        np.sort(aff.point_indices())))
        except BranchUnavailableError:
            pass
        try:
            orth = mutually_orthogonal_witness(field, d, j)
            out.append((f"orthogonal-coset[{field.q ** orth.dim}]",
                        np.sort(orth.point_indices())))
        except BranchUnavailableError:
            pass
        try:
            n_dirs = len(isotropic_directions(field, d))
            k = min(field.q + 1, n_dirs)
            if k:
                out.append((f"line-cosets[{k}]", isotropic_line_cosets(field, d, j, k)))
        except (BranchUnavailableError, ValueError):
            pass
        try:
            section = isotropic_hyperplane_section(field, d, j)
            if len(section):
                out.append((f"hyperplane-section[{len(section)}]", section))
        except (BranchUnavailableError, ValueError):
            pass
    return out


def witness_functions(V: QuadraticVariety, single: bool = False):
    """Structured functions on V: witness-set indicators plus a point mass.

    Yields (label, GridFunction) lazily — on big grids each function is a
    full q^d array, so only one may be alive at a time.
    """
    field, d = V.field, V.d
    dtype = np.complex64 if single else np.complex128
    for label, idx in witness_sets(V):
        values = np.zeros(field.q**d, dtype=dtype)
        values[idx] = 1.0
        yield f"indicator:{label}", GridFunction(field, d, values)
    values = np.zeros(field.q**d, dtype=dtype)
    values[V.points[:1]] = 1.0
    yield "point-mass", GridFunction(field, d, values)


def random_functions(V: QuadraticVariety, count: int, rng: np.random.Generator,
                     single: bool = False):
    """Random test functions supported on V, yielded lazily: a deterministic
    rotation of dyadic-size random indicators, unimodular random phases, and
    complex gaussian profiles."""
    field, d = V.field, V.d
    dtype = np.complex64 if single else np.complex128
    n_levels = max(1, int(np.log2(V.size)))
    for i in range(count):
        kind = i % 3
        values = np.zeros(field.q**d, dtype=dtype)
        if kind == 0:
            size = max(1, V.size >> (1 + (i // 3) % n_levels))
            pts = rng.choice(V.points, size=size, replace=False)
            values[pts] = 1.0
            label = f"dyadic-indicator[{size}]#{i}"
        elif kind == 1:
            phases = np.exp(2j * np.pi * rng.random(V.size))
            values[V.points] = phases.astype(dtype)
            label = f"random-phase#{i}"
        else:
            g = rng.standard_normal(V.size) + 1j * rng.standard_normal(V.size)
            values[V.points] = g.astype(dtype)
            label = f"gaussian#{i}"
        yield label, GridFunction(field, d, values)


def grid_subsets(field: FiniteField, d: int, sizes, count: int,
                 rng: np.random.Generator) -> list[tuple[str, np.ndarray]]:
    """Uniform random subsets of the full grid (the G of the L2 mass bound)."""
    n = field.q**d
    out = []
    for size in sizes:
        size = int(min(size, n))
        for i in range(count):
            out.append((f"random[{size}]#{i}",
                        np.sort(rng.choice(n, size=size, replace=False))))
    return out
