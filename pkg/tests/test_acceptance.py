"""Acceptance gate: twelve criteria, one printed pass/fail line each.

Each criterion drives the public harness the way a user would and asserts
the numbers the suites certify.  Suite reports are computed once per
session and shared across criteria; the final criterion checks the
cumulative wall clock and transform throughput.  The per-criterion lines
appear in the terminal summary (see conftest).
"""

import time
from collections import Counter

import numpy as np
import pytest

from conftest import ACCEPTANCE
from ffrlab.field import field_for_order
from ffrlab.grid import character_transform
from ffrlab.harness import run_suite
from ffrlab.subspaces import (
    AffineSubspace,
    no_larger_isotropic_subspace,
    sphere_affine_subspace,
    witt_decomposition,
    witt_index,
    witt_isotropic_subspace,
)
from ffrlab.varieties import norm_values

TIMINGS: dict[str, float] = {}


def _run(name: str, **overrides):
    t0 = time.perf_counter()
    report = run_suite(name, **overrides)
    TIMINGS[name] = time.perf_counter() - t0
    return report


def _record(num: int, title: str, ok) -> None:
    ACCEPTANCE.append((num, title, bool(ok)))
    assert ok, f"[criterion {num:02d}] FAIL - {title}"


@pytest.fixture(scope="session")
def gauss_report():
    return _run("gauss")


@pytest.fixture(scope="session")
def sphere_fourier_report():
    return _run("sphere-fourier")


@pytest.fixture(scope="session")
def weak_l2_report():
    return _run("weak-l2", samples=200)


@pytest.fixture(scope="session")
def weak_l4_report():
    return _run("weak-l4", samples=34)


@pytest.fixture(scope="session")
def energy_suite_report():
    return _run("energy", q_list=[5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31])


@pytest.fixture(scope="session")
def paraboloid_report():
    return _run("paraboloid-pairs")


@pytest.fixture(scope="session")
def lines_report():
    return _run("lines")


@pytest.fixture(scope="session")
def main_zero_report():
    return _run("main-zero", samples=500)


@pytest.fixture(scope="session")
def main_nonzero_report():
    return _run("main-nonzero", samples=30)


@pytest.fixture(scope="session")
def duality_report():
    return _run("duality", samples=100)


@pytest.fixture(scope="session")
def decay_report():
    return _run("decay")


def test_criterion_01_gauss_sums(gauss_report):
    rep = gauss_report
    ok = (
        rep.passed
        and {c.q for c in rep.cases} == {3, 5, 7, 9, 11, 13, 23, 25, 27, 49}
        and all(c.values["rel_err"] <= 1e-9 for c in rep.cases)
        and all(c.values["modulus_sq_rel_err"] <= 1e-9 for c in rep.cases)
    )
    _record(1, "Gauss sums match the closed form with |G|^2 = q on all ten "
               "field orders (rel. 1e-9)", ok)


def test_criterion_02_sphere_transform_closed_form(sphere_fourier_report):
    rep = sphere_fourier_report
    direct = {(c.d, c.q) for c in rep.cases if c.label == "explicit-vs-direct"}
    zero = {(c.d, c.q) for c in rep.cases if c.label == "zero-branch"}
    z63 = next(c for c in rep.cases
               if c.label == "zero-branch" and (c.d, c.q) == (6, 3))
    ok = (
        rep.passed
        and direct == {(2, 3), (2, 5), (2, 7), (3, 3), (3, 5), (4, 3), (4, 5),
                       (5, 3), (6, 3)}
        and zero == {(6, 3), (6, 7), (6, 11), (10, 3)}
        and z63.values["zero_sphere_size"] == 225
        and abs(z63.values["value_at_origin"] - 225 / 729) <= 1e-9
        and all(c.values["max_abs_err"] <= 1e-9 for c in rep.cases
                if c.label == "explicit-vs-direct")
    )
    _record(2, "sphere transform closed forms match direct summation "
               "pointwise on all pinned grids; |S_0| = 225 at (d, q) = (6, 3)",
            ok)


def test_criterion_03_zero_sphere_l2_mass(weak_l2_report):
    rep = weak_l2_report
    randoms = Counter((c.q, c.label.split(":")[0]) for c in rep.cases
                      if c.label.split(":")[0] in ("small", "middle", "large"))
    ok = (
        rep.passed
        and all(randoms[(q, reg)] >= 200 for q in (3, 7, 11)
                for reg in ("small", "middle", "large"))
        and any("isotropic-subspace" in c.label for c in rep.cases)
        and all(c.passed for c in rep.cases if c.passed is not None)
    )
    _record(3, "restricted L2 mass bound holds with constant one for 200 "
               "random sets per regime and all witness sets at d = 6, "
               "q in {3, 7, 11}: zero violations", ok)


def test_criterion_04_l4_energy_identity(weak_l4_report):
    rep = weak_l4_report
    randoms = Counter((c.d, c.q) for c in rep.cases
                      if c.label.startswith("random["))
    ok = (
        rep.passed
        and all(randoms[g] >= 100 for g in [(4, 5), (4, 7), (6, 3)])
        and all(c.values["identity_rel_err"] <= 1e-9 for c in rep.cases
                if "identity_rel_err" in c.values)
    )
    _record(4, "L4 extension norm equals the additive-energy closed form "
               "(rel. 1e-9) for 100+ random sets per grid", ok)


def test_criterion_05_energy_constant(energy_suite_report):
    rep = energy_suite_report
    fit = rep.constants["energy-ratio"]
    window = {q: v for q, v in fit.per_q_max.items() if q >= 9}
    lo, hi = min(window), max(window)
    witnesses = [c for c in rep.cases if c.label.startswith("affine-subspace")]
    ok = (
        rep.passed
        and window[hi] <= 1.1 * window[lo]
        and witnesses
        and all(c.values["energy_exact_cubed"] for c in witnesses)
        and all(c.values["energy"] <= c.values["triples"] for c in rep.cases
                if "triples" in c.values)
    )
    _record(5, "additive-energy constant does not grow (within 10% across "
               "the q-window); the affine witness attains E = |A|^3; "
               "E(A) <= triple count on every sample", ok)


def test_criterion_06_zero_distance_pairs(energy_suite_report):
    rep = energy_suite_report
    fit = rep.constants["zero-distance-ratio"]
    witnesses = [c for c in rep.cases
                 if c.label.startswith(("affine-subspace", "orthogonal-coset"))]
    ok = (
        set(fit.per_q_max) == {5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31}
        and fit.global_max <= 1.05
        and witnesses
        and all(c.values["pairs_exact_squared"] for c in witnesses)
    )
    _record(6, "zero-distance pair constant stays uniformly bounded over "
               "q in {5..31} at d = 4; the orthogonal witness attains |A|^2 "
               "exactly", ok)


def test_criterion_07_zero_sphere_extension(main_zero_report):
    rep = main_zero_report
    by_label = {c.label: c for c in rep.cases}
    sharp = by_label["witness-slope[p=2,r=2.66667]"]
    off = by_label["witness-slope[p=2,r=2.4]"]
    mono = by_label["family-max-monotone"]
    randoms = Counter(c.q for c in rep.cases
                      if not c.label.startswith(("indicator:", "point-mass",
                                                 "witness-slope", "family-max")))
    ok = (
        rep.passed
        and sharp.passed and abs(sharp.values["slope"]) <= 0.05
        and off.passed
        and abs(off.values["slope"] - off.values["predicted"]) <= 0.05
        and mono.passed
        and all(randoms[q] >= 500 for q in (3, 7, 11, 19))
    )
    _record(7, "zero-sphere extension at (p, r) = (2, (2d+4)/d): witness "
               "ratio is q-flat (slope within 0.05 of 0), the r = 2.4 slope "
               "matches its prediction, and the family max (witnesses + 500 "
               "random functions) is non-increasing from q = 7 on", ok)


def test_criterion_08_nonzero_sphere_extension(main_nonzero_report):
    rep = main_nonzero_report
    by_label = {c.label: c for c in rep.cases}
    sharp = by_label["witness-slope[p=1.6,r=4]"]
    off = by_label["witness-slope[p=1.3,r=4]"]
    ok = (
        rep.passed
        and {c.q for c in rep.cases if "|" in c.label}
            == {5, 7, 11, 13, 17, 19, 23}
        and sharp.passed and abs(sharp.values["slope"]) <= 0.05
        and off.passed
        and abs(off.values["slope"] - off.values["predicted"]) <= 0.05
    )
    _record(8, "nonzero-sphere extension at (p, r) = (4d/(3d-2), 4): the "
               "affine witness ratio is q-flat and the p = 1.3 slope matches "
               "its prediction within 0.05", ok)


def test_criterion_09_no_collinear_triples(lines_report):
    rep = lines_report
    grids = {(c.q, c.d) for c in rep.cases}
    ok = (
        rep.passed
        and grids == {(5, 2), (3, 4), (5, 3)}
        and all(c.values["violations"] == 0 for c in rep.cases)
    )
    _record(9, "exhaustive scans find no line meeting a nonzero sphere three "
               "times on any pinned grid", ok)


def test_criterion_10_duality(duality_report):
    rep = duality_report
    by_label = {c.label: c for c in rep.cases}
    attained = by_label["dual-norm-attained"]
    pairing = by_label["extension-pairing-identity"]
    family = by_label["family-max-duality"]
    ok = (
        rep.passed
        and attained.params["draws"] >= 100
        and max(attained.values.values()) <= 1e-9
        and pairing.params["draws"] >= 100
        and pairing.values["worst_rel_err"] <= 1e-9
        and family.values["rel_gap"] <= 0.05
    )
    _record(10, "dual norms are attained and match (rel. 1e-9, 100 draws), "
                "the pairing identity holds (100 draws), and extension/"
                "restriction family maxima agree within 5%", ok)


def test_criterion_11_isotropic_subspaces():
    ok = True
    for d, q in [(3, 5), (4, 3), (4, 5), (6, 3), (6, 7), (6, 5)]:
        field = field_for_order(q)
        m = witt_index(field, d)
        pairs, _ = witt_decomposition(field, d)
        basis = witt_isotropic_subspace(field, d)
        ok = ok and len(pairs) == m and len(basis) == m
        if len(basis):
            pts = AffineSubspace(field, basis,
                                 np.zeros(d, dtype=np.int64)).point_indices()
            ok = ok and len(pts) == q**m
            ok = ok and bool(np.all(norm_values(field, d)[pts] == 0))
    for d, q in [(4, 3), (6, 3)]:
        field = field_for_order(q)
        ok = ok and no_larger_isotropic_subspace(field, d, witt_index(field, d))
    for d, q, radii in [(4, 5, [1, 2, 3, 4]), (6, 3, [1, 2])]:
        field = field_for_order(q)
        for j in radii:
            aff = sphere_affine_subspace(field, d, j)
            pts = aff.point_indices()
            ok = ok and len(pts) == q**aff.dim
            ok = ok and bool(np.all(norm_values(field, d)[pts] == j))
    _record(11, "maximal isotropic subspaces match the closed-form Witt "
                "index (with exhaustive maximality certificates) and the "
                "affine sphere subspaces lie on their spheres", ok)


def test_criterion_12_runtime_budget(gauss_report, sphere_fourier_report,
                                     weak_l2_report, weak_l4_report,
                                     energy_suite_report, paraboloid_report,
                                     lines_report, main_zero_report,
                                     main_nonzero_report, duality_report,
                                     decay_report):
    total = sum(TIMINGS.values())
    field = field_for_order(11)
    rng = np.random.default_rng(0)
    n = 11**6
    batch = (rng.standard_normal((16, n))
             + 1j * rng.standard_normal((16, n))).astype(np.complex64)
    t0 = time.perf_counter()
    out = character_transform(field, 6, batch)
    sweep = time.perf_counter() - t0
    ok = total < 1800 and sweep < 60 and out.shape == (16, n)
    _record(12, f"full verification run took {total:.0f}s (< 1800s) and 16 "
                f"transforms at (q, d) = (11, 6) took {sweep:.2f}s (< 60s)",
            ok)
