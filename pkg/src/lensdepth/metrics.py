"""Metric spaces: Euclidean vectors, SPD matrices, precomputed tables.

A :class:`MetricSpace` pairs a point domain with a distance rule. Points
are plain numpy data in the domain's natural representation:

    euclidean      float array of shape (d,); samples are (n, d)
    spd-geodesic   SPD float array of shape (k, k); samples are (n, k, k)
    precomputed    integer index into the stored matrix; samples are (n,)

The SPD distance is the affine-invariant geodesic distance
``||log(A^{-1/2} B A^{-1/2})||_F``. The norm is the Frobenius norm
(square root of the trace form): with it the geodesic parameterization
is proportional to arc length, which the geodesic tests rely on.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

SYM_TOL = 1e-9
# Relative eigenvalue floor: anything at or below this times the largest
# eigenvalue is treated as a broken input, never clamped.
EIG_FLOOR = 1e-12


class DimensionMismatchError(ValueError):
    """Points do not match the space's domain."""


class NotSPDError(ValueError):
    """Matrix is not symmetric positive definite within tolerance."""


@dataclass(frozen=True)
class MetricSpace:
    """A point domain plus its distance rule.

    ``dim`` is the (intrinsic) dimension: coordinate count for euclidean
    spaces, matrix size k for SPD, and a user-declared value for
    precomputed tables (used only by the Fermat scaling diagnostic).
    """

    kind: str
    dim: int
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("euclidean", "spd-geodesic", "precomputed"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be a positive integer")
        if self.kind == "precomputed":
            if self.matrix is None:
                raise ValueError("precomputed space requires a distance matrix")
            m = np.asarray(self.matrix, dtype=np.float64)
            _check_precomputed(m)
            object.__setattr__(self, "matrix", m)
        elif self.matrix is not None:
            raise ValueError("matrix payload is only valid for kind='precomputed'")

    @property
    def size(self):
        """Number of indexable points (precomputed spaces only)."""
        if self.matrix is None:
            raise ValueError("size is defined only for precomputed spaces")
        return self.matrix.shape[0]


def euclidean_space(dim):
    return MetricSpace("euclidean", int(dim))


def spd_space(k):
    return MetricSpace("spd-geodesic", int(k))


def precomputed_space(matrix, dim=1):
    """Space over row indices of a user-supplied distance matrix.

    ``dim`` is the declared intrinsic dimension; it feeds only the
    Fermat scaling diagnostic's n**((1-p)/d) rescaling.
    """
    return MetricSpace("precomputed", int(dim), np.asarray(matrix, dtype=np.float64))


def _check_precomputed(m):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("distance matrix entries must be finite")
    if np.abs(m - m.T).max(initial=0.0) > SYM_TOL:
        raise ValueError("distance matrix is not symmetric within 1e-9")
    if m.shape[0] and np.abs(np.diagonal(m)).max() > SYM_TOL:
        raise ValueError("distance matrix diagonal is not zero")
    if m.size and m.min() < 0.0:
        raise ValueError("distance matrix has negative entries")


def as_sample(space, points):
    """Validate and normalize a batch of points for ``space``.

    Returns (n, d) float for euclidean, (n, k, k) float for SPD, and
    (n,) intp for precomputed indices.
    """
    if space.kind == "euclidean":
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.ndim != 2 or pts.shape[1] != space.dim:
            raise DimensionMismatchError(
                f"expected points of dimension {space.dim}, got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise ValueError("euclidean coordinates must be finite")
        return pts
    if space.kind == "spd-geodesic":
        mats = np.asarray(points, dtype=np.float64)
        if mats.ndim == 2:
            mats = mats[None, :, :]
        k = space.dim
        if mats.ndim != 3 or mats.shape[1] != k or mats.shape[2] != k:
            raise DimensionMismatchError(
                f"expected {k}x{k} matrices, got shape {mats.shape}"
            )
        _spd_eigh_batch(mats)  # validation only
        return mats
    idx = np.asarray(points)
    if idx.ndim == 0:
        idx = idx[None]
    if idx.ndim != 1 or not np.issubdtype(idx.dtype, np.integer):
        raise DimensionMismatchError("precomputed points must be integer indices")
    n = space.size
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"index out of range for {n}x{n} distance matrix")
    return idx.astype(np.intp)


def cross_distances(space, a, b):
    """Distance matrix between two point batches, shape (len(a), len(b))."""
    a = as_sample(space, a)
    b = as_sample(space, b)
    if space.kind == "euclidean":
        return cdist(a, b)
    if space.kind == "spd-geodesic":
        return _spd_cross(a, b)
    return space.matrix[np.ix_(a, b)].copy()


def pairwise_distances(space, points):
    """Self-distance matrix of a point batch: exactly symmetric, zero diagonal."""
    pts = as_sample(space, points)
    if space.kind == "precomputed":
        return space.matrix[np.ix_(pts, pts)].copy()
    d = cross_distances(space, pts, pts)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return d


def rowwise_distances(space, a, b):
    """Elementwise distances between two equal-length point batches."""
    a = as_sample(space, a)
    b = as_sample(space, b)
    if len(a) != len(b):
        raise DimensionMismatchError("rowwise batches must have equal length")
    if space.kind == "euclidean":
        return np.linalg.norm(a - b, axis=1)
    if space.kind == "spd-geodesic":
        inv_sqrt = spd_power(a, -0.5)
        c = np.einsum("nab,nbc,ncd->nad", inv_sqrt, b, inv_sqrt, optimize=True)
        lam = np.linalg.eigvalsh(c)
        if lam.size and lam.min() <= 0.0:
            raise NotSPDError("congruence produced a non-positive eigenvalue")
        return np.sqrt((np.log(lam) ** 2).sum(axis=-1))
    return space.matrix[a, b].copy()


def distance(space, a, b):
    """Distance between two points of the space."""
    if space.kind == "euclidean":
        pa, pb = as_sample(space, a)[0], as_sample(space, b)[0]
        if np.array_equal(pa, pb):
            return 0.0
        return float(np.linalg.norm(pa - pb))
    if space.kind == "spd-geodesic":
        return spd_distance(as_sample(space, a)[0], as_sample(space, b)[0])
    ia, ib = as_sample(space, a)[0], as_sample(space, b)[0]
    return float(space.matrix[ia, ib])


# --- SPD cone -------------------------------------------------------------

def _spd_eigh_batch(mats):
    """Eigendecompose a stack of matrices, enforcing the SPD invariants."""
    asym = np.abs(mats - mats.transpose(0, 2, 1)).max(initial=0.0)
    if asym > SYM_TOL:
        raise NotSPDError(f"matrix asymmetry {asym:.3e} exceeds tolerance {SYM_TOL}")
    w, v = np.linalg.eigh(mats)
    wmin = w.min(axis=1)
    wmax = w.max(axis=1)
    bad = wmin <= EIG_FLOOR * np.maximum(wmax, 0.0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotSPDError(
            f"matrix {i} has eigenvalue {wmin[i]:.3e} at or below the SPD floor"
        )
    return w, v


def spd_matrix_function(mats, fn):
    """Apply a scalar function to the eigenvalues of SPD matrices."""
    single = np.asarray(mats).ndim == 2
    stack = np.asarray(mats, dtype=np.float64)
    if single:
        stack = stack[None]
    w, v = _spd_eigh_batch(stack)
    out = np.einsum("nik,nk,njk->nij", v, fn(w), v)
    return out[0] if single else out


def spd_power(mats, s):
    """Matrix power A**s via eigendecomposition."""
    return spd_matrix_function(mats, lambda w: w ** s)


def spd_log(mats):
    return spd_matrix_function(mats, np.log)


def _spd_cross(a, b, block=64):
    """Affine-invariant distances between SPD stacks a (na,) and b (nb,)."""
    inv_sqrt = spd_power(a, -0.5)
    if inv_sqrt.ndim == 2:
        inv_sqrt = inv_sqrt[None]
    na, nb = inv_sqrt.shape[0], b.shape[0]
    out = np.empty((na, nb))
    for lo in range(0, na, block):
        hi = min(lo + block, na)
        s = inv_sqrt[lo:hi]
        # C[i, j] = S_i B_j S_i; eigenvalues of a congruence of SPD stay > 0
        c = np.einsum("iab,jbc,icd->ijad", s, b, s, optimize=True)
        lam = np.linalg.eigvalsh(c)
        if lam.min(initial=np.inf) <= 0.0:
            raise NotSPDError("congruence produced a non-positive eigenvalue")
        out[lo:hi] = np.sqrt((np.log(lam) ** 2).sum(axis=-1))
    return out


def spd_distance(a, b):
    """Geodesic distance on the SPD cone, ||log(A^{-1/2} B A^{-1/2})||_F."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"size mismatch: {a.shape} vs {b.shape}")
    if np.array_equal(a, b):
        _spd_eigh_batch(a[None])
        return 0.0
    return float(_spd_cross(a[None], b[None])[0, 0])


def spd_geodesic_point(a, b, s):
    """Point gamma(s) on the unique SPD geodesic from A (s=0) to B (s=1).

    gamma(s) = A^{1/2} (A^{-1/2} B A^{-1/2})^s A^{1/2}; distances along it
    satisfy d(A, gamma(s)) = s * d(A, B).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"size mismatch: {a.shape} vs {b.shape}")
    sq = spd_power(a, 0.5)
    inv_sq = spd_power(a, -0.5)
    mid = spd_power(inv_sq @ b @ inv_sq, float(s))
    out = sq @ mid @ sq
    return 0.5 * (out + out.T)


# --- small geometric utilities ---------------------------------------------

def hausdorff_distance(a, c, space):
    """Hausdorff distance between two finite non-empty point sets."""
    a = as_sample(space, a)
    c = as_sample(space, c)
    if len(a) == 0 or len(c) == 0:
        raise ValueError("hausdorff_distance requires non-empty sets")
    d = cross_distances(space, a, c)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass
class MatrixReport:
    """Validation findings for a would-be distance matrix.

    Violation lists hold index tuples with the offending values; the
    triangle list is capped (``triangle_total`` has the full count).
    """

    shape: tuple
    asymmetry: list
    diagonal: list
    negative: list
    nonfinite: list
    triangle: list
    triangle_total: int = 0
    triangle_checked: bool = False

    @property
    def ok(self):
        return not (
            self.asymmetry or self.diagonal or self.negative
            or self.nonfinite or self.triangle_total
        )

    def summary(self):
        if self.ok:
            extra = " (triangle checked)" if self.triangle_checked else ""
            return f"ok: {self.shape[0]}x{self.shape[1]} distance matrix{extra}"
        parts = []
        for name, viol in (
            ("asymmetry", self.asymmetry),
            ("nonzero diagonal", self.diagonal),
            ("negative entry", self.negative),
            ("non-finite entry", self.nonfinite),
        ):
            parts += [f"{name} at {idx}: {val!r}" for idx, val in viol]
        if self.triangle_total:
            parts.append(
                f"{self.triangle_total} triangle violations, first "
                + ", ".join(str(t[0]) for t in self.triangle[:5])
            )
        return "; ".join(parts)


def validate_distance_matrix(m, check_triangle=False, tol=SYM_TOL, max_listed=100):
    """Report (never raise) violations of the distance-matrix invariants.

    The O(n^3) triangle-inequality scan is opt-in; slightly violating
    dissimilarities (approximate tree distances and the like) are still
    usable downstream, which needs only symmetry and nonnegativity.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    report = MatrixReport(m.shape, [], [], [], [], [])

    bad = ~np.isfinite(m)
    for i, j in zip(*np.nonzero(bad)):
        if len(report.nonfinite) < max_listed:
            report.nonfinite.append(((int(i), int(j)), float(m[i, j])))
    with np.errstate(invalid="ignore"):
        asym = np.triu(np.abs(m - m.T) > tol, 1)
    for i, j in zip(*np.nonzero(asym)):
        if len(report.asymmetry) < max_listed:
            report.asymmetry.append(((int(i), int(j)), (float(m[i, j]), float(m[j, i]))))
    for i in np.nonzero(np.abs(np.diagonal(m)) > tol)[0]:
        if len(report.diagonal) < max_listed:
            report.diagonal.append((int(i), float(m[i, i])))
    neg = (m < -tol) & np.isfinite(m)
    for i, j in zip(*np.nonzero(neg)):
        if len(report.negative) < max_listed:
            report.negative.append(((int(i), int(j)), float(m[i, j])))

    if check_triangle and not report.nonfinite:
        report.triangle_checked = True
        total = 0
        for k in range(n):
            excess = m - (m[:, k, None] + m[None, k, :])
            viol = excess > tol
            viol[k, :] = False
            viol[:, k] = False
            np.fill_diagonal(viol, False)
            cnt = int(np.count_nonzero(viol))
            if cnt and len(report.triangle) < max_listed:
                for i, j in zip(*np.nonzero(viol)):
                    report.triangle.append(
                        ((int(i), int(k), int(j)), float(excess[i, j]))
                    )
                    if len(report.triangle) >= max_listed:
                        break
            total += cnt
        report.triangle_total = total
    return report
