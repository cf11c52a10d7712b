"""Variety enumeration and closed-form Fourier data, cross-checked both ways."""

import itertools

import numpy as np
import pytest

from ffrlab.field import field_for_order
from ffrlab.grid import GridFunction, fourier_inverse, index_to_coords, lp_norm
from ffrlab.varieties import (
    BranchUnavailableError,
    decay_profile,
    norm_values,
    paraboloid,
    sphere,
    sphere_cardinality,
    sphere_fourier_explicit,
    surface_extension,
    zero_sphere_fourier,
)

# --- oracle: membership by scalar field arithmetic


def oracle_sphere_points(F, d, j):
    out = []
    for idx, x in enumerate(itertools.product(range(F.q), repeat=d)):
        acc = 0
        for xi in x:
            acc = F.add(acc, F.mul(xi, xi))
        if acc == j:
            out.append(idx)
    return out


def oracle_paraboloid_points(F, d):
    out = []
    for idx, x in enumerate(itertools.product(range(F.q), repeat=d)):
        acc = 0
        for xi in x[:-1]:
            acc = F.add(acc, F.mul(xi, xi))
        if acc == x[-1]:
            out.append(idx)
    return out


@pytest.mark.parametrize("q,d", [(3, 2), (3, 3), (5, 2), (9, 2), (7, 2), (5, 3)])
def test_sphere_enumeration_matches_oracle(q, d):
    F = field_for_order(q)
    for j in range(q):
        S = sphere(F, d, j)
        assert list(S.points) == oracle_sphere_points(F, d, j)


@pytest.mark.parametrize("q,d", [(3, 2), (3, 3), (5, 2), (5, 3), (7, 2)])
def test_paraboloid_enumeration_matches_oracle(q, d):
    F = field_for_order(q)
    P = paraboloid(F, d)
    assert list(P.points) == oracle_paraboloid_points(F, d)
    assert P.size == q ** (d - 1)


def test_norm_values_first_points():
    F = field_for_order(5)
    norms = norm_values(F, 2)
    # point (1, 2) has flat index 7 and norm 1 + 4 = 0 mod 5
    assert norms[7] == 0
    assert norms[0] == 0
    assert norms[1] == 1  # (0, 1)


# --- frozen counts


def test_unit_circle_in_f3_squared():
    F = field_for_order(3)
    S = sphere(F, 2, 1)
    assert S.size == 4
    coords = {tuple(c) for c in S.coords()}
    assert coords == {(0, 1), (0, 2), (1, 0), (2, 0)}


def test_zero_sphere_f3_squared_is_origin_and_degenerate():
    F = field_for_order(3)
    S = sphere(F, 2, 0)
    assert list(S.points) == [0]
    assert S.degenerate
    assert not sphere(F, 2, 1).degenerate
    # q = 1 mod 4 gives a genuine null cone instead
    S5 = sphere(field_for_order(5), 2, 0)
    assert S5.size == 2 * 5 - 1
    assert not S5.degenerate


def test_zero_sphere_count_d6_q3():
    F = field_for_order(3)
    S = sphere(F, 6, 0)
    assert S.size == 225
    assert sphere_cardinality(F, 6, 0) == 225


@pytest.mark.parametrize("q,d", [(3, 2), (3, 3), (3, 4), (3, 5), (3, 6), (5, 2), (5, 3), (5, 4), (7, 2), (7, 3), (9, 2), (9, 3), (11, 2), (13, 3)])
def test_sphere_cardinality_formula_matches_enumeration(q, d):
    F = field_for_order(q)
    norms = norm_values(F, d)
    counts = np.bincount(norms.astype(np.int64), minlength=q)
    for j in range(q):
        assert counts[j] == sphere_cardinality(F, d, j), (q, d, j)


# --- explicit Fourier formulas vs the transform


@pytest.mark.parametrize(
    "q,d", [(3, 2), (5, 2), (7, 2), (3, 3), (5, 3), (3, 4), (5, 4), (3, 5), (9, 2)]
)
def test_sphere_fourier_explicit_matches_transform(q, d):
    F = field_for_order(q)
    for j in range(q):
        S = sphere(F, d, j)
        via_transform = fourier_inverse(S.indicator())
        explicit = sphere_fourier_explicit(F, d, j)
        assert np.allclose(explicit.values, via_transform.values, atol=1e-12), (q, d, j)


def test_sphere_fourier_at_zero_is_density():
    F = field_for_order(5)
    for j in range(5):
        explicit = sphere_fourier_explicit(F, 3, j)
        assert np.isclose(explicit.values[0].real, sphere_cardinality(F, 3, j) / 5**3)
        assert abs(explicit.values[0].imag) < 1e-12


def test_zero_sphere_fourier_branch_values():
    F = field_for_order(3)
    d = 6
    g = zero_sphere_fourier(F, d)
    ref = fourier_inverse(sphere(F, d, 0).indicator())
    assert np.allclose(g.values, ref.values, atol=1e-12)
    norms = norm_values(F, d)
    off_cone = norms != 0
    # q^-4 off the null cone for (d, q) = (6, 3)
    assert np.allclose(g.values[off_cone], 3.0**-4)
    on_cone = (norms == 0) & (np.arange(3**d) != 0)
    assert np.allclose(g.values[on_cone], -2 * 3.0**-4)
    assert np.isclose(g.values[0].real, 225 / 3**6)


def test_zero_sphere_fourier_agrees_with_general_formula_d6_q7():
    F = field_for_order(7)
    g = zero_sphere_fourier(F, 6)
    explicit = sphere_fourier_explicit(F, 6, 0)
    assert np.allclose(g.values, explicit.values, atol=1e-12)


def test_zero_sphere_fourier_rejects_wrong_parameters():
    with pytest.raises(BranchUnavailableError):
        zero_sphere_fourier(field_for_order(3), 4)  # d = 0 mod 4
    with pytest.raises(BranchUnavailableError):
        zero_sphere_fourier(field_for_order(5), 6)  # q = 1 mod 4
    with pytest.raises(BranchUnavailableError):
        zero_sphere_fourier(field_for_order(3), 5)  # odd d


# --- surface extension


def test_surface_extension_at_origin_is_mean():
    F = field_for_order(5)
    S = sphere(F, 3, 1)
    ext = surface_extension(S)
    assert np.isclose(ext.values[0], 1.0)  # (dsigma)-vee(0) = 1
    rng = np.random.default_rng(4)
    f = GridFunction(F, 3, rng.standard_normal(125) + 1j * rng.standard_normal(125))
    extf = surface_extension(S, f)
    assert np.isclose(extf.values[0], np.mean(f.values[S.points]))


def test_surface_extension_matches_direct_character_sum():
    F = field_for_order(3)
    S = sphere(F, 2, 1)
    ext = surface_extension(S)
    coords = S.coords()
    for m_idx in range(9):
        m = index_to_coords(F, 2, np.array(m_idx))
        acc = 0j
        for x in coords:
            acc += F.additive_character(F.dot(np.asarray(m), np.asarray(x)))
        assert np.isclose(ext.values[m_idx], acc / S.size)


def test_surface_extension_single_precision():
    F = field_for_order(7)
    S = sphere(F, 3, 2)
    a = surface_extension(S)
    b = surface_extension(S, single=True)
    assert b.values.dtype == np.complex64
    assert np.allclose(a.values, b.values, atol=1e-4)


# --- decay


@pytest.mark.parametrize("q,d,j", [(5, 3, 1), (7, 3, 1), (3, 3, 2), (9, 3, 1), (5, 5, 1)])
def test_odd_dimensional_sphere_decay(q, d, j):
    S = sphere(field_for_order(q), d, j)
    report = decay_profile(S)
    assert report.benchmark == pytest.approx(q ** (-(d - 1) / 2))
    # Weil: the completed exponential sum is at most 2 sqrt(q); the surface
    # normalisation contributes the density correction q^(d-1)/|S|.
    assert report.ratio <= 2.0 * q ** (d - 1) / S.size + 1e-9
    assert not report.degenerate


@pytest.mark.parametrize("q,d,j", [(3, 4, 1), (5, 4, 1), (3, 6, 0), (7, 4, 3)])
def test_even_dimensional_sphere_decay(q, d, j):
    S = sphere(field_for_order(q), d, j)
    report = decay_profile(S)
    assert report.benchmark == pytest.approx(q ** (-(d - 2) / 2))
    assert report.ratio <= 2.0 * q ** (d - 1) / S.size + 1e-9


@pytest.mark.parametrize("q,d", [(5, 2), (5, 3), (7, 3), (3, 4)])
def test_paraboloid_decay_is_exactly_the_benchmark(q, d):
    report = decay_profile(paraboloid(field_for_order(q), d))
    assert report.ratio == pytest.approx(1.0, rel=1e-9)


def test_degenerate_sphere_flagged_and_flat():
    S = sphere(field_for_order(3), 2, 0)
    report = decay_profile(S)
    assert report.degenerate
    ext = surface_extension(S)
    assert np.allclose(ext.values, 1.0)


def test_surface_measure_mass_and_norm():
    F = field_for_order(3)
    S = sphere(F, 2, 1)
    sigma = S.measure()
    assert np.isclose(lp_norm(S.indicator(), 1, sigma), 1.0)
