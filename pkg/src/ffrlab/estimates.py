"""Counting quantities and inequality checks on sphere/paraboloid subsets.

Everything returns exact integer counts (chunked table arithmetic, no
floating point) plus small report dataclasses comparing the counts against
the bounds they are supposed to satisfy.  Wherever a quantity has two
independent characterizations (zero-distance pairs vs dot products,
sphere-membership triples vs orthogonal-leg triples, transform norms vs
energy identities) both are computed and cross-asserted rather than
collapsed into one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ffrlab.field import FiniteField
from ffrlab.grid import (
    COUNTING,
    GridFunction,
    coords_to_index,
    fourier_forward,
    index_to_coords,
    indicator,
    lp_norm,
)
from ffrlab.varieties import QuadraticVariety, norm_values, sphere, surface_extension


def _row_chunks(n: int, width: int, budget: int = 4_000_000):
    rows = max(1, budget // max(1, n * width))
    for start in range(0, n, rows):
        yield start, min(n, start + rows)


# --- additive energy -----------------------------------------------------------


def pair_sum_counts(field: FiniteField, d: int, indices: np.ndarray) -> np.ndarray:
    """r(m) = #{(a, b) in A^2 : a + b = m} as a dense q^d tally."""
    idx = np.asarray(indices, dtype=np.int64)
    coords = index_to_coords(field, d, idx)
    counts = np.zeros(field.q**d, dtype=np.int64)
    for s, e in _row_chunks(len(idx), d):
        sums = field.add(coords[s:e, None, :], coords[None, :, :])
        counts += np.bincount(
            coords_to_index(field, sums).ravel(), minlength=field.q**d
        )
    return counts


def additive_energy(field: FiniteField, d: int, indices: np.ndarray) -> int:
    """E(A) = #{(a,b,c,d) in A^4 : a+b = c+d} = sum_m r(m)^2, exactly."""
    r = pair_sum_counts(field, d, indices)
    return int(np.sum(r * r))


@dataclass
class EnergyReport:
    q: int
    d: int
    size: int
    energy: int
    term_cubic: float  # |A|^3 / q
    term_quadratic: float  # q^((d-2)/2) |A|^2
    ratio: float


def energy_report(field: FiniteField, S: QuadraticVariety, indices: np.ndarray) -> EnergyReport:
    """Additive energy of A against |A|^3/q + q^((d-2)/2)|A|^2."""
    indices = np.asarray(indices, dtype=np.int64)
    _require_subset(S, indices)
    n = len(indices)
    E = additive_energy(field, S.d, indices)
    if not (2 * n * n - n <= E <= n**3):
        raise RuntimeError(f"energy {E} escaped its trivial range for |A| = {n}")
    t1 = n**3 / field.q
    t2 = float(field.q) ** ((S.d - 2) / 2) * n * n
    return EnergyReport(field.q, S.d, n, E, t1, t2, E / (t1 + t2))


# --- zero-distance pairs ---------------------------------------------------------


@dataclass
class ZeroDistanceReport:
    q: int
    d: int
    size: int
    pairs: int
    term_quadratic: float  # |A|^2 / q
    term_linear: float  # q^((d-2)/2) |A|
    ratio: float


def _require_subset(S: QuadraticVariety, indices: np.ndarray) -> None:
    if not np.all(np.isin(indices, S.points)):
        raise ValueError("point set is not contained in the variety")


def zero_distance_pairs(
    field: FiniteField, S: QuadraticVariety, indices: np.ndarray
) -> ZeroDistanceReport:
    """Ordered pairs of A x A at distance zero, A on a sphere of radius j != 0.

    Counted twice: as {x.y = j} and as {|x-y|^2 = 0} (equivalent by
    polarization on the sphere); a mismatch raises.  Includes x = y.
    """
    indices = np.asarray(indices, dtype=np.int64)
    if S.kind != "sphere" or S.j == 0:
        raise ValueError("zero-distance pair counts live on spheres of nonzero radius")
    _require_subset(S, indices)
    coords = index_to_coords(field, S.d, indices)
    n = len(indices)
    count_dot = 0
    count_dist = 0
    for s, e in _row_chunks(n, S.d):
        G = field.dot(coords[s:e, None, :], coords[None, :, :])
        count_dot += int(np.sum(G == S.j))
        diffs = field.sub(coords[s:e, None, :], coords[None, :, :])
        count_dist += int(np.sum(field.dot(diffs, diffs) == 0))
    if count_dot != count_dist:
        raise RuntimeError(
            f"polarization mismatch: {count_dot} pairs with x.y=j vs "
            f"{count_dist} pairs at distance zero"
        )
    t1 = n * n / field.q
    t2 = float(field.q) ** ((S.d - 2) / 2) * n
    return ZeroDistanceReport(field.q, S.d, n, count_dot, t1, t2, count_dot / (t1 + t2))


# --- orthogonal triples -----------------------------------------------------------


@dataclass
class TripleReport:
    q: int
    d: int
    size: int
    membership_count: int
    dot_count: int | None  # None when the quadratic-cost dual check was skipped
    energy: int


def orthogonal_triples(
    field: FiniteField,
    S: QuadraticVariety,
    indices: np.ndarray,
    dual_check: bool | None = None,
) -> TripleReport:
    """#{(x,y,z) in A^3 : x+y-z on the sphere}, with the dot-product dual count.

    The membership count runs through the pair-sum tally r and costs
    O(|A| |S|); the dual characterization #{(x-z).(y-z) = 0} costs
    O(|A|^3) table lookups and is skipped for |A| > 300 unless forced.
    Also recomputes the additive energy and asserts E(A) <= triples.
    """
    indices = np.asarray(indices, dtype=np.int64)
    _require_subset(S, indices)
    coords = index_to_coords(field, S.d, indices)
    n = len(indices)
    r = pair_sum_counts(field, S.d, indices)
    scoords = S.coords()
    membership = 0
    for s, e in _row_chunks(S.size, S.d):
        shifted = field.add(scoords[s:e, None, :], coords[None, :, :])
        membership += int(np.sum(r[coords_to_index(field, shifted)]))
    E = int(np.sum(r * r))
    if E > membership:
        raise RuntimeError(f"energy {E} exceeds triple count {membership}")
    dot_count = None
    if dual_check is None:
        dual_check = n <= 300
    if dual_check:
        dot_count = 0
        for k in range(n):
            dz = field.sub(coords, coords[k][None, :])
            G = field.dot(dz[:, None, :], dz[None, :, :])
            dot_count += int(np.sum(G == 0))
        if dot_count != membership:
            raise RuntimeError(
                f"triple characterizations disagree: membership {membership}, "
                f"orthogonal legs {dot_count}"
            )
    return TripleReport(field.q, S.d, n, membership, dot_count, E)


# --- paraboloid pair counts --------------------------------------------------------


@dataclass
class ParaboloidPairReport:
    q: int
    base_dim: int
    size_a: int
    size_b: int
    pairs: int
    bound: float
    ratio: float


def _on_paraboloid(field: FiniteField, pts: np.ndarray) -> bool:
    base, last = pts[:, :-1], pts[:, -1]
    norms = field.dot(base, base)
    return bool(np.all(norms == last))


def paraboloid_hypothesis_violation(field: FiniteField, pts: np.ndarray):
    """First pair (i, k) with base parts proportional by lambda not in {0, 1}."""
    base = pts[:, :-1]
    n = len(pts)
    lead_pos = np.argmax(base != 0, axis=1)
    nonzero = base.any(axis=1)
    for i in range(n):
        if not nonzero[i]:
            continue
        lam = field.mul(base[:, lead_pos[i]], field.inv(base[i, lead_pos[i]]))
        scaled = field.mul(lam[:, None], base[i][None, :])
        prop = np.all(scaled == base, axis=1) & nonzero
        bad = prop & (lam != 0) & (lam != 1)
        bad[i] = False
        hits = np.nonzero(bad)[0]
        if len(hits):
            return i, int(hits[0])
    return None


def paraboloid_pair_count(
    field: FiniteField, pts_a: np.ndarray, pts_b: np.ndarray
) -> ParaboloidPairReport:
    """Pairs (alpha, beta) in A x B with alpha + beta on the paraboloid.

    Points are (n, base_dim + 1) coordinate arrays.  The separation
    hypothesis on A (no two base parts proportional by lambda outside
    {0, 1}) is checked up front; every counted pair is verified to have
    orthogonal base parts, which is the reduction behind the bound
    |A||B|/q + q^((base_dim - 1)/2) sqrt(|A||B|).
    """
    pts_a = np.asarray(pts_a, dtype=np.int64)
    pts_b = np.asarray(pts_b, dtype=np.int64)
    base_dim = pts_a.shape[1] - 1
    if not (_on_paraboloid(field, pts_a) and _on_paraboloid(field, pts_b)):
        raise ValueError("input points must lie on the paraboloid")
    offender = paraboloid_hypothesis_violation(field, pts_a)
    if offender is not None:
        i, k = offender
        raise ValueError(
            f"separation hypothesis fails: points {pts_a[i].tolist()} and "
            f"{pts_a[k].tolist()} have proportional base parts"
        )
    count = 0
    for s, e in _row_chunks(len(pts_b), base_dim + 1):
        sums = field.add(pts_a[:, None, :], pts_b[None, s:e, :])
        on_p = field.dot(sums[..., :-1], sums[..., :-1]) == sums[..., -1]
        if np.any(on_p):
            dots = field.dot(pts_a[:, None, :-1], pts_b[None, s:e, :-1])
            if np.any(dots[on_p] != 0):
                raise RuntimeError("a counted pair has non-orthogonal base parts")
        count += int(np.sum(on_p))
    bound = len(pts_a) * len(pts_b) / field.q + float(field.q) ** (
        (base_dim - 1) / 2
    ) * math.sqrt(len(pts_a) * len(pts_b))
    return ParaboloidPairReport(
        field.q, base_dim, len(pts_a), len(pts_b), count, bound, count / bound
    )


# --- the triple-count chain behind the energy bound ---------------------------------


@dataclass
class ChainReport:
    """Per-z decomposition of orthogonal-leg triples into isotropic-leg and
    paraboloid-lift counts, plus the dilation identity check."""

    z_index: int
    case_isotropic: int
    case_lifted: int
    total: int
    dilated_pairs: int
    dilation_factor: int


def triple_chain_report(
    field: FiniteField,
    S: QuadraticVariety,
    indices: np.ndarray,
    z_positions,
    check_dilation: bool = True,
) -> list[ChainReport]:
    """For chosen z in A, split #{(x,y): (x-z).(y-z)=0} into the leg cases.

    Case 1 has an isotropic leg (|x-z| or |y-z| of zero length); case 2
    lifts to the paraboloid in one higher dimension, where its count is
    recomputed by paraboloid_pair_count and must match.  The dilation check
    scales the second lifted set by every lambda outside {0, 1} and
    verifies the pair count multiplies by exactly q - 2.
    """
    indices = np.asarray(indices, dtype=np.int64)
    _require_subset(S, indices)
    coords = index_to_coords(field, S.d, indices)
    q = field.q
    out = []
    for k in z_positions:
        dz = field.sub(coords, coords[k][None, :])
        leg_norms = field.dot(dz, dz)
        G = field.dot(dz[:, None, :], dz[None, :, :])
        orth = G == 0
        iso = (leg_norms == 0)[:, None] | (leg_norms == 0)[None, :]
        case1 = int(np.sum(orth & iso))
        case2 = int(np.sum(orth & ~iso))
        lift = np.concatenate([dz, leg_norms[:, None]], axis=1)
        lift = lift[leg_norms != 0]
        pair_report = paraboloid_pair_count(field, lift, lift)
        if pair_report.pairs != case2:
            raise RuntimeError(
                f"lifted pair count {pair_report.pairs} != direct case-2 {case2}"
            )
        dilated_pairs = -1
        if check_dilation and len(lift):
            lam = np.arange(2, q)
            scaled_base = field.mul(lam[:, None, None], lift[None, :, :-1])
            scaled_last = field.mul(
                field.mul(lam, lam)[:, None], lift[None, :, -1]
            )
            dilated = np.concatenate(
                [scaled_base, scaled_last[:, :, None]], axis=2
            ).reshape(-1, S.d + 1)
            if len(np.unique(coords_to_index(field, dilated))) != (q - 2) * len(lift):
                raise RuntimeError("dilated lift lost points; collinear pair slipped in")
            dilated_pairs = paraboloid_pair_count(field, lift, dilated).pairs
            if dilated_pairs != (q - 2) * case2:
                raise RuntimeError(
                    f"dilation identity fails: {dilated_pairs} != (q-2) * {case2}"
                )
        out.append(ChainReport(int(indices[k]), case1, case2, case1 + case2, dilated_pairs, q - 2))
    return out


# --- point-hyperplane incidences -----------------------------------------------------


@dataclass
class IncidenceReport:
    q: int
    d: int
    points: int
    hyperplanes: int
    incidences: int
    bound: float
    ratio: float


def incidence_count(
    field: FiniteField, points: np.ndarray, normals: np.ndarray
) -> IncidenceReport:
    """Incidences between points and through-origin hyperplanes {x : x.h = 0}.

    Normals must be nonzero and pairwise non-proportional; compared against
    |P||H|/q + q^((d-1)/2) sqrt(|P||H|).
    """
    points = np.asarray(points, dtype=np.int64)
    normals = np.asarray(normals, dtype=np.int64)
    d = points.shape[1]
    if not normals.any(axis=1).all():
        raise ValueError("hyperplane normals must be nonzero")
    lead_pos = np.argmax(normals != 0, axis=1)
    lead = normals[np.arange(len(normals)), lead_pos]
    monic = field.mul(field.inv(lead)[:, None], normals)
    if len(np.unique(coords_to_index(field, monic))) != len(normals):
        raise ValueError("normals must be pairwise non-proportional")
    inc = 0
    for s, e in _row_chunks(len(normals), d):
        dots = field.dot(points[:, None, :], normals[None, s:e, :])
        inc += int(np.sum(dots == 0))
    bound = len(points) * len(normals) / field.q + float(field.q) ** (
        (d - 1) / 2
    ) * math.sqrt(len(points) * len(normals))
    return IncidenceReport(
        field.q, d, len(points), len(normals), inc, bound, inc / bound
    )


# --- collinear triples on spheres ------------------------------------------------------


def collinear_triple_check(field: FiniteField, S: QuadraticVariety) -> list[tuple]:
    """All triples of distinct sphere points with x - z = lambda (y - z),
    lambda outside {0, 1} and the direction non-isotropic; must come back
    empty (a line with non-isotropic direction meets the sphere twice).
    Returns (x, y, z) flat-index triples.  Cost O(|S|^2 q).
    """
    if S.kind != "sphere" or S.j == 0:
        raise ValueError("the collinearity scan applies to spheres of nonzero radius")
    coords = S.coords()
    n = S.size
    member = np.zeros(field.q**S.d, dtype=bool)
    member[S.points] = True
    violations: list[tuple] = []
    for s, e in _row_chunks(n, S.d):
        diffs = field.sub(coords[None, :, :], coords[s:e, None, :])  # [z, y] → y - z
        norms = field.dot(diffs, diffs)
        valid = norms != 0
        for lam in range(2, field.q):
            pts = field.add(coords[s:e, None, :], field.mul(lam, diffs))
            hit = member[coords_to_index(field, pts)] & valid
            for zi, yi in np.argwhere(hit):
                x_flat = int(coords_to_index(field, pts[zi, yi]))
                violations.append((x_flat, int(S.points[yi]), int(S.points[s + zi])))
    return violations


# --- weak-type restriction / extension checks -------------------------------------------


@dataclass
class RegimeBound:
    label: str
    lower: float
    upper: float
    bound: float
    measured: float
    ratio: float


@dataclass
class ZeroSphereL2Report:
    q: int
    d: int
    size: int
    lhs_sum: float  # sum over the zero sphere of |1_G-hat|^2
    rhs_exact: float  # q^(d-1)|G| + q^((d-2)/2)|G|^2
    exact_holds: bool
    hypotheses_met: bool
    regime: RegimeBound | None


def _l2_regime(field: FiniteField, d: int, size: int, measured: float) -> RegimeBound:
    q = float(field.q)
    if size <= q ** (d / 2):
        label, lo, hi, bound = "small", 1.0, q ** (d / 2), math.sqrt(size)
    elif size <= q ** ((d + 2) / 2):
        label, lo, hi, bound = (
            "middle",
            q ** (d / 2),
            q ** ((d + 2) / 2),
            q ** (-d / 4) * size,
        )
    else:
        label, lo, hi, bound = (
            "large",
            q ** ((d + 2) / 2),
            q**d,
            math.sqrt(q) * math.sqrt(size),
        )
    return RegimeBound(label, lo, hi, bound, measured, measured / bound if bound else 0.0)


def restriction_l2_zero_sphere(
    field: FiniteField, d: int, G_indices: np.ndarray, single: bool = False
) -> ZeroSphereL2Report:
    """Mass of the transform of 1_G on the zero sphere vs the two-term bound.

    The inequality sum_{x in S_0} |1_G-hat(x)|^2 <= q^(d-1)|G| +
    q^((d-2)/2)|G|^2 holds with constant exactly 1 when d = 2 mod 4 and
    q = 3 mod 4 (it unwinds from positivity of the zero-distance tally);
    outside those hypotheses the report only measures.  The regime entry
    classifies |G| per the three-range weak-type bound on the L^2 norm.
    """
    G_indices = np.asarray(G_indices, dtype=np.int64)
    q = field.q
    size = len(G_indices)
    S0 = sphere(field, d, 0)
    if size == 0:
        return ZeroSphereL2Report(q, d, 0, 0.0, 0.0, True, d % 4 == 2 and q % 4 == 3, None)
    dtype = np.complex64 if single else np.complex128
    values = np.zeros(q**d, dtype=dtype)
    values[G_indices] = 1.0
    ghat = fourier_forward(GridFunction(field, d, values))
    sq = np.abs(ghat.values[S0.points]) ** 2
    lhs = float(np.sum(sq, dtype=np.float64))
    rhs = float(q) ** (d - 1) * size + float(q) ** ((d - 2) / 2) * size * size
    hypotheses = d % 4 == 2 and q % 4 == 3
    exact_holds = lhs <= rhs * (1 + 1e-9)
    measured_norm = math.sqrt(lhs / S0.size)
    return ZeroSphereL2Report(
        q, d, size, lhs, rhs, exact_holds, hypotheses, _l2_regime(field, d, size, measured_norm)
    )


@dataclass
class WeakL4Report:
    q: int
    d: int
    j: int
    size: int
    norm_direct: float
    norm_identity: float
    energy: int
    regime: RegimeBound


def _l4_regime(field: FiniteField, d: int, size: int, measured: float) -> RegimeBound:
    q = float(field.q)
    if size <= q ** ((d - 2) / 2):
        label, lo, hi = "small", 1.0, q ** ((d - 2) / 2)
        bound = q ** ((-3 * d + 4) / 4) * size ** (3 / 4)
    elif size <= q ** (d / 2):
        label, lo, hi = "middle", q ** ((d - 2) / 2), q ** (d / 2)
        bound = q ** ((-5 * d + 6) / 8) * math.sqrt(size)
    else:
        label, lo, hi = "large", q ** (d / 2), q ** (d - 1)
        bound = q ** ((-3 * d + 3) / 4) * size ** (3 / 4)
    return RegimeBound(label, lo, hi, bound, measured, measured / bound)


def weak_l4_nonzero_sphere(
    field: FiniteField, S: QuadraticVariety, indices: np.ndarray
) -> WeakL4Report:
    """L^4 norm of the extension of 1_A from a nonzero-radius sphere.

    Computed two independent ways — the grid transform and the exact
    additive-energy identity q^(d/4) |S|^(-1) E(A)^(1/4) — which must agree
    to 1e-9 relative; the regime entry reports the three-range weak bound.
    """
    indices = np.asarray(indices, dtype=np.int64)
    if S.kind != "sphere" or S.j == 0:
        raise ValueError("the weak L4 bound concerns spheres of nonzero radius")
    _require_subset(S, indices)
    ext = surface_extension(S, indicator(field, S.d, indices))
    direct = lp_norm(ext, 4, COUNTING)
    E = additive_energy(field, S.d, indices)
    ident = float(field.q) ** (S.d / 4) / S.size * E**0.25
    if not math.isclose(direct, ident, rel_tol=1e-9, abs_tol=1e-12):
        raise RuntimeError(
            f"transform norm {direct} disagrees with energy identity {ident}"
        )
    return WeakL4Report(
        field.q, S.d, S.j, len(indices), direct, ident, E,
        _l4_regime(field, S.d, len(indices), direct),
    )


# --- extension/restriction ratios and exponent arithmetic --------------------------------


@dataclass
class RatioSample:
    descriptor: str
    p: float
    r: float
    ratio: float
    q: int
    d: int


def extension_ratio(
    field: FiniteField,
    V: QuadraticVariety,
    f: GridFunction,
    p: float,
    r: float,
    descriptor: str = "",
    single: bool = False,
) -> RatioSample:
    """|| (f dsigma)-vee ||_{L^r(dm)} / ||f||_{L^p(V, dsigma)}."""
    denom = lp_norm(f, p, V.measure())
    if denom == 0.0:
        raise ValueError("f vanishes on the variety")
    num = lp_norm(surface_extension(V, f, single=single), r, COUNTING)
    return RatioSample(descriptor, p, r, num / denom, field.q, V.d)


def restriction_ratio(
    field: FiniteField,
    V: QuadraticVariety,
    g: GridFunction,
    p: float,
    r: float,
    descriptor: str = "",
) -> RatioSample:
    """|| g-hat ||_{L^{p'}(V, dsigma)} / ||g||_{L^{r'}(dm)}, the dual-side ratio.

    The exponents (p, r) name the extension-side pair; the dual estimate for
    the same operator-norm constant restricts with L^{r'} -> L^{p'}.
    """
    pprime = p / (p - 1) if p != 1 else np.inf
    rprime = r / (r - 1) if r != 1 else np.inf
    denom = lp_norm(g, rprime, COUNTING)
    if denom == 0.0:
        raise ValueError("g is zero")
    num = lp_norm(fourier_forward(g), pprime, V.measure())
    return RatioSample(descriptor, p, r, num / denom, field.q, V.d)


def subspace_ratio_closed_form(
    field: FiniteField, V: QuadraticVariety, ell: int, p: float, r: float
) -> float:
    """Exact extension ratio of a dimension-ell subspace indicator on V.

    The extension of 1_H has modulus (|H|/|V|) exactly on the q^(d-ell)
    points of the annihilator coset and vanishes elsewhere, giving
    ratio = (|H|/|V|)^(1 - 1/p) * q^((d - ell)/r).
    """
    frac = field.q**ell / V.size
    return frac ** (1 - 1 / p) * float(field.q) ** ((V.d - ell) / r)


def necessary_exponents(d: int, k: int, p: float) -> float:
    """Minimal admissible r for the extension exponent pair, from the
    subspace obstruction: max(2d/(d-1), p(d-k)/((p-1)(d-1-k))).

    k is the log_q size of the obstructing subspace; p = 1 returns inf
    (no finite r admissible).
    """
    if not 0 <= k <= d - 2:
        raise ValueError(f"subspace log-size k={k} out of range for d={d}")
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 1:
        return math.inf
    return max(2 * d / (d - 1), p * (d - k) / ((p - 1) * (d - 1 - k)))


def witness_exponent_prediction(d: int, ell: int, p: float, r: float) -> float:
    """Predicted growth exponent in q of the subspace-witness extension ratio:
    e = (ell - d + 1)(1 - 1/p) + (d - ell)/r; zero exactly at sharp pairs."""
    if ell >= d - 1:
        raise ValueError("the witness dimension must satisfy ell < d - 1")
    return (ell - d + 1) * (1 - 1 / p) + (d - ell) / r
