"""Isotropic subspaces of the dot-product form on F_q^d, and sphere witnesses.

Everything here concerns the quadratic form Q(x) = x_1^2 + ... + x_d^2 and
its polarization B(x, y) = x.y (so B(x, x) = Q(x); the characteristic is
odd).  The central construction is a hyperbolic-pair decomposition of the
form, from which we read off a maximal totally isotropic subspace, a change
of basis to the normal form diag(1, -1, ..., 1, -alpha), affine subspaces
lying on spheres, and the structured point sets used as extremal witnesses
by the estimate suites.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ffrlab.field import FiniteField
from ffrlab.grid import all_coords, coords_to_index, index_to_coords
from ffrlab.varieties import BranchUnavailableError, sphere

# --- linear algebra over F_q --------------------------------------------------


def fmatmul(field: FiniteField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix product over the field; A is (m, k), B is (k, n)."""
    return field.dot(A[:, None, :], np.ascontiguousarray(B.T)[None, :, :])


def gram(field: FiniteField, A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
    """Pairwise dot products of the rows of A (and B)."""
    if B is None:
        B = A
    return field.dot(A[:, None, :], B[None, :, :])


def rref(field: FiniteField, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns, in place over the field."""
    R = np.array(M, dtype=np.int64, copy=True)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.nonzero(R[r:, c])[0]
        if len(hit) == 0:
            continue
        i = r + hit[0]
        R[[r, i]] = R[[i, r]]
        R[r] = field.mul(field.inv(R[r, c]), R[r])
        for k in range(rows):
            if k != r and R[k, c]:
                R[k] = field.sub(R[k], field.mul(R[k, c], R[r]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(field: FiniteField, M: np.ndarray) -> int:
    return len(rref(field, M)[1])


def nullspace(field: FiniteField, M: np.ndarray) -> np.ndarray:
    """Rows spanning {x : M x = 0}; shape (cols - rank, cols)."""
    R, pivots = rref(field, M)
    cols = M.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, c in enumerate(pivots):
            basis[i, c] = field.neg(R[r, f])
    return basis


def smallest_nonsquare(field: FiniteField) -> int:
    return int(np.nonzero(field.eta_table == -1)[0][0])


# --- diagonalization and value representation ---------------------------------


def quadratic_value(field: FiniteField, G: np.ndarray, c: np.ndarray) -> int:
    """c G c^T for a single coefficient vector c."""
    return int(field.dot(c, fmatmul(field, c[None, :], G)[0]))


def diagonalize_form(field: FiniteField, G: np.ndarray):
    """Orthogonal basis for the symmetric form G.

    Returns ``(T, diag, residual)``: rows of T with pairwise B = 0 and
    Q(T[i]) = diag[i] != 0, plus residual rows spanning a subspace on which
    the form vanishes identically (empty when G is nondegenerate).
    """
    k = G.shape[0]
    C = np.eye(k, dtype=np.int64)
    T_rows, diag = [], []
    while C.shape[0] > 0:
        Gb = fmatmul(field, fmatmul(field, C, G), C.T)
        nz_diag = np.nonzero(np.diag(Gb))[0]
        if len(nz_diag):
            u_c = np.zeros(C.shape[0], dtype=np.int64)
            u_c[nz_diag[0]] = 1
        else:
            nz = np.argwhere(Gb != 0)
            if len(nz) == 0:
                return np.array(T_rows, dtype=np.int64).reshape(-1, k), np.array(
                    diag, dtype=np.int64
                ), C
            i, j = nz[0]
            u_c = np.zeros(C.shape[0], dtype=np.int64)
            u_c[i] = 1
            u_c[j] = 1
        u = fmatmul(field, u_c[None, :], C)[0]
        qu = quadratic_value(field, G, u)
        T_rows.append(u)
        diag.append(qu)
        # orthogonal complement of u inside the row space of C
        a = fmatmul(field, fmatmul(field, C, G), u[None, :].T)[:, 0]
        N = nullspace(field, a[None, :])
        C = fmatmul(field, N, C)
    return np.array(T_rows, dtype=np.int64).reshape(-1, k), np.array(
        diag, dtype=np.int64
    ), C[:0]


def isotropic_vector(field: FiniteField, G: np.ndarray) -> np.ndarray | None:
    """A nonzero c with c G c^T = 0, or None when the form is anisotropic."""
    k = G.shape[0]
    for i in range(k):
        if G[i, i] == 0:
            e = np.zeros(k, dtype=np.int64)
            e[i] = 1
            return e
    T, a, residual = diagonalize_form(field, G)
    if len(residual):
        return residual[0]
    q = field.q
    if len(a) >= 3:
        # a0 x^2 + a1 y^2 = -a2 always has a solution
        target = field.neg(a[2])
        x = np.repeat(np.arange(q), q)
        y = np.tile(np.arange(q), q)
        vals = field.add(
            field.mul(a[0], field.mul(x, x)), field.mul(a[1], field.mul(y, y))
        )
        hit = np.nonzero(vals == target)[0][0]
        return field.add(
            field.add(field.mul(x[hit], T[0]), field.mul(y[hit], T[1])), T[2]
        )
    if len(a) == 2:
        ratio = field.neg(field.mul(a[1], field.inv(a[0])))
        if field.quadratic_character(ratio) != 1:
            return None
        x = np.arange(q)
        hit = np.nonzero(field.mul(x, x) == ratio)[0][0]
        return field.add(field.mul(x[hit], T[0]), T[1])
    return None


def represent_value(field: FiniteField, G: np.ndarray, t: int) -> np.ndarray | None:
    """A coefficient vector c with c G c^T = t (t != 0), or None."""
    T, a, _residual = diagonalize_form(field, G)
    q = field.q
    if len(a) >= 2:
        x = np.repeat(np.arange(q), q)
        y = np.tile(np.arange(q), q)
        vals = field.add(
            field.mul(a[0], field.mul(x, x)), field.mul(a[1], field.mul(y, y))
        )
        hits = np.nonzero(vals == t)[0]
        if len(hits) == 0:
            return None
        h = hits[0]
        return field.add(field.mul(x[h], T[0]), field.mul(y[h], T[1]))
    if len(a) == 1:
        x = np.arange(q)
        hits = np.nonzero(field.mul(a[0], field.mul(x, x)) == t)[0]
        if len(hits) == 0:
            return None
        return field.mul(x[hits[0]], T[0])
    return None


# --- Witt decomposition --------------------------------------------------------


def witt_index(field: FiniteField, d: int) -> int:
    """Closed-form Witt index of x_1^2 + ... + x_d^2 over F_q.

    (d-1)/2 for odd d; d/2 for even d when the discriminant (-1)^(d/2) is a
    square (d = 0 mod 4, or q = 1 mod 4); otherwise (d-2)/2.
    """
    if d % 2 == 1:
        return (d - 1) // 2
    disc = field.pow(field.neg(1), d // 2)
    return d // 2 if field.quadratic_character(disc) == 1 else (d - 2) // 2


def witt_decomposition(field: FiniteField, d: int):
    """Hyperbolic pairs and anisotropic kernel of the standard form.

    Returns ``(pairs, kernel)`` where pairs is a list of (w, v) in ambient
    coordinates with Q(w) = Q(v) = 0, B(w, v) = 1, planes pairwise
    orthogonal, and kernel rows span the orthogonal anisotropic remainder
    (dimension 0, 1 or 2).
    """
    G0 = np.eye(d, dtype=np.int64)
    C = np.eye(d, dtype=np.int64)
    pairs = []
    while C.shape[0] >= 2:
        G = fmatmul(field, fmatmul(field, C, G0), C.T)
        w_c = isotropic_vector(field, G)
        if w_c is None:
            break
        u = fmatmul(field, w_c[None, :], G)[0]
        pivot = int(np.nonzero(u)[0][0])
        v_c = np.zeros(C.shape[0], dtype=np.int64)
        v_c[pivot] = field.inv(u[pivot])
        # v <- v - (Q(v)/2) w makes the pair hyperbolic
        qv = quadratic_value(field, G, v_c)
        lam = field.mul(qv, field.inv(field.element(2)))
        v_c = field.sub(v_c, field.mul(lam, w_c))
        w = fmatmul(field, w_c[None, :], C)[0]
        v = fmatmul(field, v_c[None, :], C)[0]
        pairs.append((w, v))
        rows = np.stack([fmatmul(field, w_c[None, :], G)[0], fmatmul(field, v_c[None, :], G)[0]])
        N = nullspace(field, rows)
        C = fmatmul(field, N, C)
    return pairs, C


def witt_isotropic_subspace(field: FiniteField, d: int) -> np.ndarray:
    """Basis rows of a maximal totally isotropic subspace (the Witt index)."""
    pairs, _ = witt_decomposition(field, d)
    if not pairs:
        return np.zeros((0, d), dtype=np.int64)
    return np.stack([w for w, _ in pairs])


def no_larger_isotropic_subspace(field: FiniteField, d: int, m: int) -> bool:
    """Exhaustively certify that no (m+1)-dim totally isotropic subspace exists.

    A totally isotropic subspace of dimension m+1 is exactly the span of m+1
    linearly independent, pairwise orthogonal isotropic vectors, so the
    search is a DFS over canonical-ordered isotropic vectors with rank and
    orthogonality pruning.  Exponential in the worst case; intended for
    small grids.
    """
    iso = sphere(field, d, 0).points
    iso = iso[iso != 0]
    V = index_to_coords(field, d, iso)
    n = len(V)
    orth = gram(field, V) == 0

    def reduce_against(rows: list[np.ndarray], v: np.ndarray) -> np.ndarray:
        v = v.copy()
        for r in rows:
            lead = int(np.nonzero(r)[0][0])
            if v[lead]:
                v = field.sub(v, field.mul(v[lead], r))
        return v

    def dfs(first_free: int, mask: np.ndarray, rows: list[np.ndarray], depth: int) -> bool:
        """True if a pairwise-orthogonal independent chain of `depth` more exists."""
        if depth == 0:
            return True
        for i in range(first_free, n):
            if not mask[i]:
                continue
            res = reduce_against(rows, V[i])
            if not res.any():
                continue
            res = field.mul(field.inv(res[np.nonzero(res)[0][0]]), res)
            if dfs(i + 1, mask & orth[i], rows + [res], depth - 1):
                return True
        return False

    return not dfs(0, np.ones(n, dtype=bool), [], m + 1)


# --- normal form and sphere subspaces ------------------------------------------


def equivalence_transform(field: FiniteField, d: int) -> tuple[np.ndarray, int]:
    """Invertible M with M^T M = diag(1, -1, 1, -1, ..., 1, -alpha), even d.

    alpha is 1 when (-1)^(d/2) is a square (so the sphere form is hyperbolic)
    and the smallest nonsquare otherwise; columns are found greedily in
    successive orthogonal complements.
    """
    if d % 2 or d < 2:
        raise ValueError("the normal form is defined for even d >= 2")
    disc = field.pow(field.neg(1), d // 2)
    alpha = 1 if field.quadratic_character(disc) == 1 else smallest_nonsquare(field)
    minus_one = field.neg(1)
    targets = [1, minus_one] * (d // 2 - 1) + [1, field.neg(alpha)]
    G0 = np.eye(d, dtype=np.int64)
    C = np.eye(d, dtype=np.int64)
    cols = []
    for t in targets:
        G = fmatmul(field, fmatmul(field, C, G0), C.T)
        c = represent_value(field, G, t)
        if c is None:
            raise BranchUnavailableError(
                f"normal form target {t} not represented; alpha bookkeeping is wrong"
            )
        u = fmatmul(field, c[None, :], C)[0]
        cols.append(u)
        a = fmatmul(field, fmatmul(field, C, G0), u[None, :].T)[:, 0]
        C = fmatmul(field, nullspace(field, a[None, :]), C)
    M = np.stack(cols, axis=1)
    return M, alpha


@dataclass
class AffineSubspace:
    """offset + row-span of basis, inside F_q^d."""

    field: FiniteField
    basis: np.ndarray  # (m, d)
    offset: np.ndarray  # (d,)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1] if self.basis.size else len(self.offset)

    def point_coords(self) -> np.ndarray:
        """All q^m points as (q^m, d) coordinates."""
        coeffs = all_coords(self.field, self.dim) if self.dim else np.zeros((1, 0), dtype=np.int64)
        pts = np.broadcast_to(self.offset, (len(coeffs), self.ambient_dim)).copy()
        for i in range(self.dim):
            pts = self.field.add(pts, self.field.mul(coeffs[:, i : i + 1], self.basis[i][None, :]))
        return pts

    def point_indices(self) -> np.ndarray:
        """Sorted flat indices of the points."""
        return np.sort(coords_to_index(self.field, self.point_coords()))

    def to_dict(self) -> dict:
        return {
            "q": self.field.q,
            "basis": self.basis.tolist(),
            "offset": self.offset.tolist(),
        }


def sphere_affine_subspace(field: FiniteField, d: int, j: int) -> AffineSubspace:
    """An affine subspace of dimension (d-2)/2 inside the sphere of radius j.

    Needs even d >= 4 and j != 0.  In normal-form coordinates the first
    (d-2)/2 coordinate pairs carry the pattern (1, -1), so the sums of each
    pair's basis columns are isotropic and pairwise orthogonal; the offset
    uses the last pair to realise the radius.
    """
    q = field.q
    j = int(j) % q
    if d % 2 or d < 4:
        raise BranchUnavailableError("sphere affine subspaces need even d >= 4")
    if j == 0:
        raise BranchUnavailableError("radius must be nonzero")
    M, alpha = equivalence_transform(field, d)
    basis = np.stack(
        [field.add(M[:, 2 * i], M[:, 2 * i + 1]) for i in range(d // 2 - 1)]
    )
    # (a, b) with a^2 - alpha b^2 = j
    a = np.repeat(np.arange(q), q)
    b = np.tile(np.arange(q), q)
    vals = field.sub(field.mul(a, a), field.mul(alpha, field.mul(b, b)))
    h = np.nonzero(vals == j)[0][0]
    offset = field.add(field.mul(a[h], M[:, d - 2]), field.mul(b[h], M[:, d - 1]))
    return AffineSubspace(field, basis, offset)


def mutually_orthogonal_witness(field: FiniteField, d: int, j: int) -> AffineSubspace:
    """A coset t + H inside the sphere of radius j != 0 with every pairwise
    difference of zero length, |A| = q^((d-2)/2); even d >= 4.

    H is spanned by (d-2)/2 of the hyperbolic-pair isotropic vectors and t
    is an orthogonal vector of length j, taken from a spare hyperbolic plane
    when one remains and from the anisotropic kernel otherwise.  The
    additive energy of the coset is exactly |A|^3.
    """
    q = field.q
    j = int(j) % q
    if d % 2 or d < 4:
        raise BranchUnavailableError("the witness needs even d >= 4")
    if j == 0:
        raise BranchUnavailableError("radius must be nonzero")
    pairs, kernel = witt_decomposition(field, d)
    m = (d - 2) // 2
    if len(pairs) < m:
        raise BranchUnavailableError("not enough hyperbolic planes")  # cannot happen
    H = np.stack([w for w, _ in pairs[:m]])
    if len(pairs) > m:
        w, v = pairs[m]
        c = field.mul(j, field.inv(field.element(2)))
        t = field.add(w, field.mul(c, v))
    else:
        # anisotropic kernel has dimension 2 here and represents everything
        Gk = gram(field, kernel)
        c = represent_value(field, Gk, j)
        if c is None:
            raise BranchUnavailableError("kernel failed to represent the radius")
        t = fmatmul(field, c[None, :], kernel)[0]
    return AffineSubspace(field, H, t)


# --- structured sphere subsets used as suite witnesses --------------------------


def isotropic_directions(field: FiniteField, d: int) -> np.ndarray:
    """Projective representatives of isotropic directions, canonical order."""
    iso = sphere(field, d, 0).points
    iso = iso[iso != 0]
    V = index_to_coords(field, d, iso)
    lead_pos = np.argmax(V != 0, axis=1)
    lead = V[np.arange(len(V)), lead_pos]
    scaled = field.mul(field.inv(lead)[:, None], V)
    rep = coords_to_index(field, scaled)
    _, first = np.unique(rep, return_index=True)
    return scaled[np.sort(first)]


def isotropic_line_cosets(
    field: FiniteField, d: int, j: int, count: int
) -> np.ndarray:
    """Union of `count` sphere-contained lines with distinct isotropic
    directions; returns sorted flat point indices.

    Each line is t + F_q w with w isotropic and t a point of the radius-j
    sphere orthogonal to w, so the line lies entirely on the sphere and
    contributes q^2 zero-length ordered differences.
    """
    q = field.q
    j = int(j) % q
    if j == 0:
        raise ValueError("radius must be nonzero")
    dirs = isotropic_directions(field, d)
    if count > len(dirs):
        raise ValueError(f"only {len(dirs)} isotropic directions exist")
    S = sphere(field, d, j)
    coords = S.coords()
    pieces = []
    c = np.arange(q)
    for w in dirs[:count]:
        bvals = field.dot(coords, np.broadcast_to(w, coords.shape))
        t = coords[np.nonzero(bvals == 0)[0][0]]
        line = field.add(t[None, :], field.mul(c[:, None], w[None, :]))
        pieces.append(coords_to_index(field, line))
    return np.unique(np.concatenate(pieces))


def isotropic_hyperplane_section(field: FiniteField, d: int, j: int) -> np.ndarray:
    """Flat indices of the sphere slice {x in S_j : x.h = 0} for the first
    isotropic direction h; the slice fibres over a conic with line fibres."""
    j = int(j) % field.q
    h = isotropic_directions(field, d)[0]
    S = sphere(field, d, j)
    coords = S.coords()
    bvals = field.dot(coords, np.broadcast_to(h, coords.shape))
    return S.points[bvals == 0]
