"""Tolerance-aware dense complex linear algebra primitives.

Everything here is deterministic (randomized helpers take explicit seeds)
and pure: inputs are never mutated.  Matrices are plain complex ndarrays;
subspaces carry an orthonormal column basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ClusteringAmbiguous, EmptyBasis, NotHermitian

__all__ = [
    "Tolerance",
    "Subspace",
    "rank_and_nullspace",
    "hermitian_eigenspaces",
    "generalized_eigenspaces",
    "pseudo_inverse",
    "random_hermitian_in_span",
    "orthonormal_columns",
    "subspace_distance",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared across the library.

    eps_rank is a relative singular-value cutoff, eps_residual an absolute
    residual bound used by verification routines, and max_retries the
    budget for reseeding randomized draws.
    """

    eps_rank: float = 1e-12
    eps_residual: float = 1e-9
    max_retries: int = 8

    def __post_init__(self):
        if not (0 < self.eps_rank < 1):
            raise ValueError("eps_rank must lie in (0, 1)")
        if self.eps_residual <= 0:
            raise ValueError("eps_residual must be positive")
        if self.max_retries <= 0:
            raise ValueError("max_retries must be positive")

    def rank_cutoff(self, sigma_max, shape):
        return self.eps_rank * sigma_max * max(shape)

    def cluster_width(self, scale):
        # explicit merge rule for floating point eigenvalues
        return 1e3 * self.eps_residual * max(scale, 1.0)


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Subspace:
    """A subspace given by an orthonormal column basis of the ambient space."""

    basis: np.ndarray  # shape (ambient_dim, dim)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        return self.basis @ self.basis.conj().T

    @staticmethod
    def full(ambient_dim):
        return Subspace(np.eye(ambient_dim, dtype=complex))

    @staticmethod
    def empty(ambient_dim):
        return Subspace(np.zeros((ambient_dim, 0), dtype=complex))

    @staticmethod
    def from_span(vectors, tol=DEFAULT_TOL):
        """Orthonormal basis for the column span of ``vectors``."""
        return Subspace(orthonormal_columns(vectors, tol))

    def intersect(self, other, tol=DEFAULT_TOL):
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimensions differ")
        eye = np.eye(self.ambient_dim)
        stacked = np.vstack([eye - self.projector(), eye - other.projector()])
        _, null = rank_and_nullspace(stacked, tol)
        return null

    def orthogonal_complement(self, tol=DEFAULT_TOL):
        _, null = rank_and_nullspace(self.basis.conj().T, tol)
        return null

    def contains(self, vectors, tol=DEFAULT_TOL):
        vectors = np.asarray(vectors, dtype=complex)
        resid = vectors - self.basis @ (self.basis.conj().T @ vectors)
        return float(np.linalg.norm(resid)) <= tol.eps_residual * max(
            1.0, float(np.linalg.norm(vectors))
        )


def _as_complex(m):
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def orthonormal_columns(vectors, tol=DEFAULT_TOL, floor=0.0):
    """SVD-based orthonormal basis of the column span, at numerical rank.

    ``floor`` is an absolute singular-value cutoff on top of the relative
    one; callers orthonormalizing residuals of unit-scale data pass it so
    that pure round-off noise does not masquerade as new directions.
    """
    vectors = _as_complex(vectors)
    if vectors.size == 0 or min(vectors.shape) == 0:
        return np.zeros((vectors.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((vectors.shape[0], 0), dtype=complex)
    cutoff = max(tol.rank_cutoff(s[0], vectors.shape), floor)
    rank = int(np.sum(s > cutoff))
    return u[:, :rank]


def rank_and_nullspace(m, tol=DEFAULT_TOL):
    """Numerical rank and an orthonormal basis of the (right) null space."""
    m = _as_complex(m)
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return 0, Subspace(np.eye(cols, dtype=complex))
    _, s, vh = np.linalg.svd(m)
    sigma_max = s[0] if s.size else 0.0
    if sigma_max == 0.0:
        return 0, Subspace(np.eye(cols, dtype=complex))
    rank = int(np.sum(s > tol.rank_cutoff(sigma_max, m.shape)))
    null = vh[rank:].conj().T
    return rank, Subspace(null)


def _cluster_values(values, width):
    """Single-linkage clustering of complex values; returns index groups."""
    order = np.lexsort((values.imag, values.real))
    groups = []
    assigned = np.full(len(values), -1, dtype=int)
    for idx in order:
        placed = False
        for g, members in enumerate(groups):
            if any(abs(values[idx] - values[m]) <= width for m in members):
                members.append(idx)
                assigned[idx] = g
                placed = True
                break
        if not placed:
            assigned[idx] = len(groups)
            groups.append([idx])
    return groups


def hermitian_eigenspaces(h, tol=DEFAULT_TOL):
    """Eigenvalues of a Hermitian matrix with clustered eigenspaces.

    Returns a list of (eigenvalue, Subspace) pairs, eigenvalues ascending.
    Eigenvalues closer than the cluster width are merged into one space.
    """
    h = _as_complex(h)
    if np.linalg.norm(h - h.conj().T) > tol.eps_residual * max(1.0, np.linalg.norm(h)):
        raise NotHermitian("matrix is not Hermitian within eps_residual")
    h = (h + h.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(h)
    width = tol.cluster_width(np.linalg.norm(h, 2) if h.size else 0.0)
    out = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > width:
            out.append((float(np.mean(vals[start:i])), Subspace(vecs[:, start:i])))
            start = i
    return out


def _spectral_subspace(m, center, radius):
    """Orthonormal basis of the invariant subspace for eigenvalues near center."""
    _, z, sdim = scipy.linalg.schur(
        m, output="complex", sort=lambda x: abs(x - center) <= radius
    )
    return z[:, :sdim]


def generalized_eigenspaces(m, tol=DEFAULT_TOL):
    """Generalized eigenspaces (spectral subspaces) of a square matrix.

    Each returned Subspace is the invariant subspace attached to one
    cluster of eigenvalues; together they are independent and span the
    ambient space.  Raises ClusteringAmbiguous when eigenvalue clusters
    chain together over a range much wider than the merge width.
    """
    m = _as_complex(m)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if n == 0:
        return []
    vals = np.linalg.eigvals(m)
    width = tol.cluster_width(np.linalg.norm(m, 2))
    groups = _cluster_values(vals, width)
    out = []
    total = 0
    for members in groups:
        cvals = vals[members]
        center = complex(np.mean(cvals))
        diameter = max(abs(v - center) for v in cvals)
        if diameter > 10.0 * width and len(members) > 1:
            raise ClusteringAmbiguous(
                "eigenvalue clusters chain over %g (width %g)" % (diameter, width)
            )
        basis = _spectral_subspace(m, center, diameter + width / 2.0)
        if basis.shape[1] != len(members):
            raise ClusteringAmbiguous("spectral subspace dimension mismatch")
        out.append((center, Subspace(basis)))
        total += basis.shape[1]
    if total != n:
        raise ClusteringAmbiguous("generalized eigenspaces do not span")
    out.sort(key=lambda p: (p[0].real, p[0].imag))
    return out


def pseudo_inverse(m, tol=DEFAULT_TOL):
    """Moore-Penrose inverse at the numerical rank decided by eps_rank."""
    m = _as_complex(m)
    return np.linalg.pinv(m, rcond=tol.eps_rank * max(m.shape))


def random_hermitian_in_span(basis, seed):
    """Hermitian part of a complex-Gaussian combination of basis matrices.

    Draws i.i.d. standard complex Gaussian coefficients c_i from the seeded
    generator and returns M + M^dag for M = sum_i c_i B_i.  Deterministic
    for a fixed seed.
    """
    mats = [np.asarray(b, dtype=complex) for b in basis]
    if len(mats) == 0:
        raise EmptyBasis("random draw from an empty basis")
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
    m = sum(c * b for c, b in zip(coeffs, mats))
    return m + m.conj().T


def subspace_distance(a, b):
    """Operator-norm distance between the projectors of two subspaces."""
    return float(np.linalg.norm(a.projector() - b.projector(), 2))
