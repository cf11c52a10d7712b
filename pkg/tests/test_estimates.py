"""Counting/inequality layer vs brute-force loop oracles on tiny sets."""

import math

import numpy as np
import pytest

from ffrlab.estimates import (
    ChainReport,
    additive_energy,
    collinear_triple_check,
    energy_report,
    extension_ratio,
    incidence_count,
    necessary_exponents,
    orthogonal_triples,
    pair_sum_counts,
    paraboloid_pair_count,
    restriction_l2_zero_sphere,
    restriction_ratio,
    subspace_ratio_closed_form,
    triple_chain_report,
    weak_l4_nonzero_sphere,
    witness_exponent_prediction,
    zero_distance_pairs,
)
from ffrlab.field import field_for_order
from ffrlab.grid import (
    COUNTING,
    GridFunction,
    coords_to_index,
    fourier_forward,
    index_to_coords,
    indicator,
    inner_product,
    lp_norm,
)
from ffrlab.subspaces import (
    AffineSubspace,
    mutually_orthogonal_witness,
    sphere_affine_subspace,
    witt_index,
    witt_isotropic_subspace,
)
from ffrlab.varieties import QuadraticVariety, paraboloid, sphere, surface_extension


def random_subset(rng, points, size):
    return np.sort(rng.choice(points, size=size, replace=False))


# --- additive energy ---------------------------------------------------------------


class TestAdditiveEnergy:
    def test_singleton(self):
        F = field_for_order(5)
        assert additive_energy(F, 3, np.array([7])) == 1

    def test_generic_pair_is_sidon(self):
        F = field_for_order(7)
        # {0, e_1}: all pairwise sums distinct, so E = 2|A|^2 - |A| = 6.
        assert additive_energy(F, 2, np.array([0, 7])) == 6

    def test_affine_subspace_saturates(self):
        F = field_for_order(3)
        A = sphere_affine_subspace(F, 6, 1)
        idx = A.point_indices()
        assert additive_energy(F, 6, idx) == len(idx) ** 3

    def test_pair_sum_tally_total(self):
        F = field_for_order(5)
        rng = np.random.default_rng(11)
        idx = rng.choice(F.q**3, size=17, replace=False)
        r = pair_sum_counts(F, 3, idx)
        assert int(r.sum()) == 17 * 17

    def test_against_triple_loop_oracle(self):
        F = field_for_order(5)
        S = sphere(F, 4, 1)
        rng = np.random.default_rng(202)
        idx = random_subset(rng, S.points, 20)
        coords = index_to_coords(F, 4, idx)
        members = {tuple(c) for c in coords}
        # E(A) = #{(a, b, c) : a + b - c in A}
        count = 0
        for a in coords:
            for b in coords:
                s = F.add(a, b)
                for c in coords:
                    if tuple(F.sub(s, c)) in members:
                        count += 1
        assert additive_energy(F, 4, idx) == count

    def test_report_fields_and_subset_guard(self):
        F = field_for_order(5)
        S = sphere(F, 4, 1)
        rng = np.random.default_rng(3)
        idx = random_subset(rng, S.points, 15)
        rep = energy_report(F, S, idx)
        assert rep.size == 15 and rep.q == 5 and rep.d == 4
        assert rep.term_cubic == pytest.approx(15**3 / 5)
        assert rep.term_quadratic == pytest.approx(5.0 * 15**2)
        assert rep.ratio == pytest.approx(rep.energy / (rep.term_cubic + rep.term_quadratic))
        off = np.setdiff1d(np.arange(F.q**4), S.points)[:1]
        with pytest.raises(ValueError):
            energy_report(F, S, np.concatenate([idx, off]))


# --- zero-distance pairs --------------------------------------------------------------


class TestZeroDistancePairs:
    def test_against_double_loop_oracle(self):
        F = field_for_order(7)
        S = sphere(F, 4, 1)
        rng = np.random.default_rng(404)
        idx = random_subset(rng, S.points, 25)
        coords = index_to_coords(F, 4, idx)
        count = 0
        for x in coords:
            for y in coords:
                if F.dot(x, y) == 1:
                    count += 1
        rep = zero_distance_pairs(F, S, idx)
        assert rep.pairs == count
        assert rep.term_quadratic == pytest.approx(25 * 25 / 7)
        assert rep.term_linear == pytest.approx(7.0 * 25)

    def test_orthogonal_witness_saturates(self):
        F = field_for_order(3)
        S = sphere(F, 6, 1)
        idx = mutually_orthogonal_witness(F, 6, 1).point_indices()
        rep = zero_distance_pairs(F, S, idx)
        assert rep.pairs == len(idx) ** 2

    def test_preconditions(self):
        F = field_for_order(5)
        S = sphere(F, 4, 1)
        off = np.setdiff1d(np.arange(F.q**4), S.points)[:2]
        with pytest.raises(ValueError):
            zero_distance_pairs(F, S, off)
        with pytest.raises(ValueError):
            zero_distance_pairs(F, sphere(F, 4, 0), np.array([0]))


# --- orthogonal triples ----------------------------------------------------------------


class TestOrthogonalTriples:
    def test_against_triple_loop_oracle(self):
        F = field_for_order(5)
        S = sphere(F, 3, 2)
        rng = np.random.default_rng(77)
        idx = random_subset(rng, S.points, 12)
        coords = index_to_coords(F, 3, idx)
        sphere_set = {tuple(c) for c in S.coords()}
        count = 0
        for x in coords:
            for y in coords:
                s = F.add(x, y)
                for z in coords:
                    if tuple(F.sub(s, z)) in sphere_set:
                        count += 1
        rep = orthogonal_triples(F, S, idx, dual_check=True)
        assert rep.membership_count == count
        assert rep.dot_count == count
        assert rep.energy <= rep.membership_count

    def test_chain_totals_sum_to_triples(self):
        F = field_for_order(5)
        S = sphere(F, 4, 1)
        rng = np.random.default_rng(9)
        idx = random_subset(rng, S.points, 18)
        rep = orthogonal_triples(F, S, idx, dual_check=True)
        chain = triple_chain_report(F, S, idx, range(len(idx)), check_dilation=False)
        assert sum(c.total for c in chain) == rep.membership_count

    def test_dual_check_skipped_when_large(self):
        F = field_for_order(3)
        S = sphere(F, 4, 1)
        rep = orthogonal_triples(F, S, S.points, dual_check=False)
        assert rep.dot_count is None
        assert rep.energy <= rep.membership_count


class TestTripleChain:
    def test_dilation_identity(self):
        F = field_for_order(5)
        S = sphere(F, 4, 1)
        rng = np.random.default_rng(15)
        idx = random_subset(rng, S.points, 18)
        for rep in triple_chain_report(F, S, idx, [0, 3, 7]):
            assert isinstance(rep, ChainReport)
            assert rep.case_isotropic + rep.case_lifted == rep.total
            if rep.dilated_pairs >= 0:
                assert rep.dilated_pairs == rep.dilation_factor * rep.case_lifted
                assert rep.dilation_factor == F.q - 2

    def test_smallest_field(self):
        F = field_for_order(3)
        S = sphere(F, 4, 2)
        for rep in triple_chain_report(F, S, S.points[:10], [0, 1]):
            assert rep.dilation_factor == 1
            if rep.dilated_pairs >= 0:
                assert rep.dilated_pairs == rep.case_lifted


# --- paraboloid pair counts ---------------------------------------------------------------


def paraboloid_points(field, base_coords):
    base = np.asarray(base_coords, dtype=np.int64)
    norms = field.dot(base, base)
    return np.concatenate([base, norms[:, None]], axis=1)


class TestParaboloidPairs:
    def test_origin_only(self):
        F = field_for_order(5)
        pts = paraboloid_points(F, [[0, 0]])
        rep = paraboloid_pair_count(F, pts, pts)
        assert rep.pairs == 1

    def test_against_double_loop_oracle(self):
        F = field_for_order(5)
        # One point per projective direction keeps the separation hypothesis.
        bases = [[0, 0], [1, 0], [0, 1], [1, 1], [2, 1], [3, 1], [4, 1]]
        pts = paraboloid_points(F, bases)
        count = 0
        for a in pts:
            for b in pts:
                s = F.add(a, b)
                if F.dot(s[:-1], s[:-1]) == s[-1]:
                    count += 1
        rep = paraboloid_pair_count(F, pts, pts)
        assert rep.pairs == count
        assert rep.base_dim == 2
        assert rep.bound == pytest.approx(49 / 5 + math.sqrt(5) * 7)

    def test_separation_violation_raises(self):
        F = field_for_order(5)
        pts = paraboloid_points(F, [[1, 0], [2, 0]])
        with pytest.raises(ValueError, match="separation"):
            paraboloid_pair_count(F, pts, pts)

    def test_membership_guard(self):
        F = field_for_order(5)
        bad = np.array([[1, 0, 3]])
        good = paraboloid_points(F, [[0, 0]])
        with pytest.raises(ValueError, match="paraboloid"):
            paraboloid_pair_count(F, bad, good)

    def test_second_argument_may_break_separation(self):
        F = field_for_order(5)
        a = paraboloid_points(F, [[1, 1]])
        b = paraboloid_points(F, [[1, 0], [2, 0], [3, 0]])
        rep = paraboloid_pair_count(F, a, b)
        assert rep.pairs >= 0  # hypothesis applies to the first set only


# --- incidences ------------------------------------------------------------------------------


class TestIncidences:
    def test_against_double_loop_oracle(self):
        F = field_for_order(7)
        rng = np.random.default_rng(500)
        pts = index_to_coords(F, 4, rng.choice(F.q**4, size=50, replace=False))
        seen, normals = set(), []
        while len(normals) < 50:
            v = rng.integers(0, 7, size=4)
            if not v.any():
                continue
            lead = v[np.argmax(v != 0)]
            key = tuple(F.mul(F.inv(lead), v).tolist())
            if key not in seen:
                seen.add(key)
                normals.append(v)
        normals = np.array(normals, dtype=np.int64)
        count = sum(
            1 for p in pts for h in normals if F.dot(p, h) == 0
        )
        rep = incidence_count(F, pts, normals)
        assert rep.incidences == count
        assert rep.bound == pytest.approx(2500 / 7 + 7 ** 1.5 * 50)

    def test_normal_validation(self):
        F = field_for_order(5)
        pts = np.array([[0, 0]])
        with pytest.raises(ValueError, match="nonzero"):
            incidence_count(F, pts, np.array([[0, 0]]))
        with pytest.raises(ValueError, match="non-proportional"):
            incidence_count(F, pts, np.array([[1, 2], [2, 4]]))


# --- collinear triples -------------------------------------------------------------------------


class TestCollinearTriples:
    @pytest.mark.parametrize("q,d,j", [(5, 2, 1), (3, 4, 1)])
    def test_spheres_have_no_collinear_triples(self, q, d, j):
        F = field_for_order(q)
        assert collinear_triple_check(F, sphere(F, d, j)) == []

    def test_detector_fires_on_planted_line(self):
        # Synthetic "variety" containing three collinear points with a
        # non-isotropic direction; the scanner must report it.
        F = field_for_order(5)
        pts = coords_to_index(F, np.array([[0, 1], [1, 1], [2, 1]]))
        fake = QuadraticVariety("sphere", F, 2, 1, np.sort(pts))
        hits = collinear_triple_check(F, fake)
        assert len(hits) > 0
        for x, y, z in hits:
            assert {x, y, z} <= set(fake.points.tolist())

    def test_zero_radius_rejected(self):
        F = field_for_order(5)
        with pytest.raises(ValueError):
            collinear_triple_check(F, sphere(F, 2, 0))


# --- L2 mass on the zero sphere -----------------------------------------------------------------


class TestZeroSphereL2:
    def test_empty_set_trivial(self):
        F = field_for_order(3)
        rep = restriction_l2_zero_sphere(F, 6, np.array([], dtype=np.int64))
        assert rep.lhs_sum == 0.0 and rep.exact_holds and rep.regime is None

    def test_singleton(self):
        F = field_for_order(3)
        S0 = sphere(F, 6, 0)
        rep = restriction_l2_zero_sphere(F, 6, np.array([5]))
        assert rep.lhs_sum == pytest.approx(S0.size)
        assert rep.rhs_exact == pytest.approx(3**5 + 9.0)
        assert rep.exact_holds and rep.hypotheses_met
        assert rep.regime.label == "small"
        assert rep.regime.measured == pytest.approx(1.0)
        assert rep.regime.bound == pytest.approx(1.0)

    def test_full_space_closed_form(self):
        F = field_for_order(3)
        rep = restriction_l2_zero_sphere(F, 6, np.arange(3**6))
        # 1_G-hat is q^d at frequency zero (which lies on S_0) and 0 elsewhere.
        assert rep.lhs_sum == pytest.approx(float(3) ** 12)
        assert rep.exact_holds
        assert rep.regime.label == "large"

    @pytest.mark.parametrize("size", [4, 27, 100, 700])
    def test_random_sets_obey_exact_constant(self, size):
        F = field_for_order(3)
        rng = np.random.default_rng(size)
        idx = rng.choice(3**6, size=size, replace=False)
        rep = restriction_l2_zero_sphere(F, 6, idx)
        assert rep.hypotheses_met
        assert rep.exact_holds

    def test_outside_hypotheses_still_measures(self):
        F = field_for_order(5)
        rep = restriction_l2_zero_sphere(F, 4, np.arange(10))
        assert not rep.hypotheses_met
        assert rep.lhs_sum > 0

    def test_boundaries_assign_to_lower_regime(self):
        F = field_for_order(3)
        rng = np.random.default_rng(0)
        at_mid = restriction_l2_zero_sphere(F, 6, rng.choice(3**6, 27, replace=False))
        assert at_mid.regime.label == "small"
        at_top = restriction_l2_zero_sphere(F, 6, rng.choice(3**6, 3**4, replace=False))
        assert at_top.regime.label == "middle"


# --- L4 norm of sphere extensions ----------------------------------------------------------------


class TestWeakL4:
    def test_singleton_norm(self):
        F = field_for_order(5)
        S = sphere(F, 4, 1)
        rep = weak_l4_nonzero_sphere(F, S, S.points[:1])
        expected = 5.0 / S.size
        assert rep.norm_direct == pytest.approx(expected, rel=1e-12)
        assert rep.norm_identity == pytest.approx(expected, rel=1e-12)

    def test_affine_witness_saturates_middle_regime(self):
        F = field_for_order(5)
        S = sphere(F, 4, 1)
        idx = sphere_affine_subspace(F, 4, 1).point_indices()
        assert len(idx) == 5  # exactly q^((d-2)/2)
        rep = weak_l4_nonzero_sphere(F, S, idx)
        assert rep.energy == len(idx) ** 3
        assert rep.regime.label == "small"  # boundary size goes to the lower regime
        assert 0.5 <= rep.regime.ratio <= 2.5

    def test_random_sets_match_identity(self):
        F = field_for_order(7)
        S = sphere(F, 4, 3)
        rng = np.random.default_rng(1234)
        for size in (2, 10, 60):
            idx = random_subset(rng, S.points, size)
            rep = weak_l4_nonzero_sphere(F, S, idx)  # internal 1e-9 cross-assert
            assert rep.regime.ratio <= 4.0

    def test_preconditions(self):
        F = field_for_order(5)
        with pytest.raises(ValueError):
            weak_l4_nonzero_sphere(F, sphere(F, 4, 0), np.array([0]))
        S = sphere(F, 4, 1)
        off = np.setdiff1d(np.arange(F.q**4), S.points)[:1]
        with pytest.raises(ValueError):
            weak_l4_nonzero_sphere(F, S, off)


# --- ratios and exponent arithmetic ----------------------------------------------------------------


class TestRatios:
    def test_subspace_indicator_matches_closed_form(self):
        F = field_for_order(3)
        V = sphere(F, 6, 0)
        basis = witt_isotropic_subspace(F, 6)
        idx = AffineSubspace(F, basis, np.zeros(6, dtype=np.int64)).point_indices()
        assert len(idx) == 3 ** witt_index(F, 6)
        f = indicator(F, 6, idx)
        sample = extension_ratio(F, V, f, 2, 8 / 3, descriptor="subspace")
        closed = subspace_ratio_closed_form(F, V, witt_index(F, 6), 2, 8 / 3)
        assert sample.ratio == pytest.approx(closed, rel=1e-12)
        assert sample.q == 3 and sample.d == 6 and sample.descriptor == "subspace"

    def test_zero_function_rejected(self):
        F = field_for_order(3)
        V = sphere(F, 4, 1)
        with pytest.raises(ValueError):
            extension_ratio(F, V, indicator(F, 4, np.array([], dtype=np.int64)), 2, 4)

    def test_duality_pairing_identity(self):
        # <(f dsigma)-vee, g>_counting == <f, g-hat>_sigma for random f, g.
        F = field_for_order(5)
        V = sphere(F, 4, 1)
        rng = np.random.default_rng(42)
        fv = np.zeros(F.q**4, dtype=complex)
        fv[V.points] = rng.standard_normal(V.size) + 1j * rng.standard_normal(V.size)
        f = GridFunction(F, 4, fv)
        gv = rng.standard_normal(F.q**4) + 1j * rng.standard_normal(F.q**4)
        g = GridFunction(F, 4, gv)
        lhs = inner_product(surface_extension(V, f), g, COUNTING)
        rhs = inner_product(f, fourier_forward(g), V.measure())
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_restriction_ratio_runs(self):
        F = field_for_order(3)
        V = sphere(F, 4, 1)
        rng = np.random.default_rng(7)
        g = GridFunction(F, 4, rng.standard_normal(F.q**4))
        sample = restriction_ratio(F, V, g, 2, 4, descriptor="random")
        assert sample.ratio > 0
        with pytest.raises(ValueError):
            restriction_ratio(F, V, GridFunction(F, 4, np.zeros(F.q**4)), 2, 4)


class TestExponents:
    @pytest.mark.parametrize(
        "d,k,p,expected",
        [(6, 2, 2.0, 8 / 3), (4, 1, 8 / 5, 4.0), (3, 1, 2.0, 4.0)],
    )
    def test_necessary_exponents(self, d, k, p, expected):
        assert necessary_exponents(d, k, p) == pytest.approx(expected)

    def test_p_one_needs_infinite_r(self):
        assert necessary_exponents(4, 1, 1.0) == math.inf

    def test_validation(self):
        with pytest.raises(ValueError):
            necessary_exponents(4, 3, 2.0)
        with pytest.raises(ValueError):
            necessary_exponents(4, 1, 0.5)

    @pytest.mark.parametrize(
        "d,ell,p,r,expected",
        [(6, 2, 2.0, 8 / 3, 0.0), (4, 1, 8 / 5, 4.0, 0.0), (6, 2, 2.0, 2.4, 1 / 6)],
    )
    def test_witness_exponent_prediction(self, d, ell, p, r, expected):
        assert witness_exponent_prediction(d, ell, p, r) == pytest.approx(expected)

    def test_witness_dimension_guard(self):
        with pytest.raises(ValueError):
            witness_exponent_prediction(4, 3, 2.0, 4.0)


class TestParaboloidVarietyIntegration:
    def test_variety_coords_feed_the_pair_counter(self):
        # The paraboloid variety's own coordinates are valid ambient points
        # for the pair counter once thinned to one per direction.
        F = field_for_order(3)
        P = paraboloid(F, 2)
        coords = P.coords()
        thinned = coords[coords[:, 0] <= 1]  # bases 0 and 1 only
        rep = paraboloid_pair_count(F, thinned, thinned)
        oracle = 0
        for a in thinned:
            for b in thinned:
                s = F.add(a, b)
                if F.dot(s[:-1], s[:-1]) == s[-1]:
                    oracle += 1
        assert rep.pairs == oracle
