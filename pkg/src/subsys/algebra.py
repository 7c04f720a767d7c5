"""Matrix algebras generated by error sets and their structural subspaces.

The algebra generated by a set of errors is represented by a basis that is
orthonormal in the trace inner product tr(A^dag B).  From it we compute the
Jacobson radical (via the trace-form Gram matrix), the null space Z of the
error action, and the span S of the irreducible invariant subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .linalg import DEFAULT_TOL, Subspace, orthonormal_columns, rank_and_nullspace

__all__ = [
    "OperatorSet",
    "MatrixAlgebra",
    "AlgebraStructure",
    "generate_algebra",
    "adjoin_identity",
    "dagger_closure",
    "jacobson_radical",
    "zero_space",
    "semisimple_span",
    "is_invariant",
    "algebra_structure",
    "matrices_from_matrix_subspace",
]


@dataclass(frozen=True)
class OperatorSet:
    """A named list of d x d complex matrices on a common Hilbert space."""

    dim: int
    names: tuple
    operators: tuple  # tuple of (d, d) complex ndarrays

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dimension must be positive")
        if len(self.operators) == 0:
            raise ValueError("operator set is empty")
        if len(self.names) != len(self.operators):
            raise ValueError("names and operators differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("operator names must be unique")
        for op in self.operators:
            if op.shape != (self.dim, self.dim):
                raise ValueError("operator shape %s != (%d, %d)" % (op.shape, self.dim, self.dim))
            if not np.all(np.isfinite(op)):
                raise ValueError("operator contains non-finite entries")

    @staticmethod
    def from_matrices(mats, names=None):
        mats = tuple(np.asarray(m, dtype=complex) for m in mats)
        if names is None:
            names = tuple("E%d" % i for i in range(len(mats)))
        return OperatorSet(dim=mats[0].shape[0], names=tuple(names), operators=mats)

    def __len__(self):
        return len(self.operators)


@dataclass(frozen=True)
class MatrixAlgebra:
    """A multiplicatively closed matrix span with trace-orthonormal basis."""

    dim: int
    generators: OperatorSet
    basis: np.ndarray  # (nbasis, d, d), trace-orthonormal
    contains_identity: bool
    dagger_closed: bool

    @property
    def nbasis(self):
        return self.basis.shape[0]


@dataclass(frozen=True)
class AlgebraStructure:
    """Radical, null space Z and semisimple span S of an error algebra."""

    radical: Subspace  # subspace of matrix space, ambient d*d
    zero_space: Subspace  # subspace of the Hilbert space
    semisimple_span: Subspace  # subspace of the Hilbert space


def _vec(mats):
    """Stack matrices as rows of a (n, d*d) matrix."""
    mats = np.asarray(mats, dtype=complex)
    return mats.reshape(mats.shape[0], -1)


def _unvec(rows, d):
    rows = np.asarray(rows, dtype=complex)
    return rows.reshape(rows.shape[0], d, d)


def matrices_from_matrix_subspace(space):
    """Matrices corresponding to a Subspace of vectorized d x d matrices."""
    d = int(round(np.sqrt(space.ambient_dim)))
    return _unvec(space.basis.T, d)


def _orthonormal_rows(rows, tol, floor=0.0):
    """Row-space orthonormal basis (rows returned as rows)."""
    return orthonormal_columns(rows.T, tol, floor=floor).T if rows.size else rows[:0]


def _span_residual(rows, basis_rows):
    """Components of rows orthogonal to the row span of basis_rows."""
    if basis_rows.shape[0] == 0:
        return rows
    return rows - (rows @ basis_rows.conj().T) @ basis_rows


def generate_algebra(errs, tol=DEFAULT_TOL):
    """Smallest multiplicatively closed span containing the generators.

    Breadth-first closure: products of current basis elements are adjoined
    (after trace re-orthonormalization) until the span is closed.  The
    basis size is bounded by d^2, so the loop terminates.
    """
    d = errs.dim
    basis_rows = _orthonormal_rows(_vec(np.stack(errs.operators)), tol)
    while True:
        mats = _unvec(basis_rows, d)
        products = np.einsum("aij,bjk->abik", mats, mats).reshape(-1, d, d)
        prows = _vec(products)
        # noise floor: residuals of unit-scale products below this are round-off
        floor = 1e3 * tol.eps_rank * max(1.0, float(np.linalg.norm(prows, axis=1).max()))
        resid = _span_residual(prows, basis_rows)
        new_rows = _orthonormal_rows(resid, tol, floor=floor)
        # guard: re-project to kill round-off leakage back into the span
        new_rows = _orthonormal_rows(_span_residual(new_rows, basis_rows), tol, floor=floor)
        if new_rows.shape[0] == 0:
            break
        basis_rows = np.vstack([basis_rows, new_rows])
        if basis_rows.shape[0] >= d * d:
            basis_rows = _orthonormal_rows(basis_rows, tol)
            break
    return MatrixAlgebra(
        dim=d,
        generators=errs,
        basis=_unvec(basis_rows, d),
        contains_identity=_span_contains(basis_rows, np.eye(d, dtype=complex), tol),
        dagger_closed=_is_dagger_closed(basis_rows, d, tol),
    )


def _span_contains(basis_rows, mat, tol):
    v = mat.reshape(1, -1)
    resid = _span_residual(v, basis_rows)
    return float(np.linalg.norm(resid)) <= tol.eps_residual * max(1.0, float(np.linalg.norm(v)))


def _is_dagger_closed(basis_rows, d, tol):
    mats = _unvec(basis_rows, d)
    daggers = _vec(np.conj(np.transpose(mats, (0, 2, 1))))
    resid = _span_residual(daggers, basis_rows)
    return float(np.linalg.norm(resid)) <= tol.eps_residual * max(1.0, float(np.linalg.norm(daggers)))


def adjoin_identity(alg, tol=DEFAULT_TOL):
    """The algebra plus the identity; a no-op when I is already in the span."""
    if alg.contains_identity:
        return alg
    d = alg.dim
    rows = _vec(alg.basis)
    eye_row = np.eye(d, dtype=complex).reshape(1, -1)
    resid = _orthonormal_rows(
        _span_residual(eye_row, rows), tol, floor=1e3 * tol.eps_rank * np.sqrt(d)
    )
    basis_rows = np.vstack([rows, resid])
    return replace(
        alg,
        basis=_unvec(basis_rows, d),
        contains_identity=True,
        dagger_closed=_is_dagger_closed(basis_rows, d, tol),
    )


def dagger_closure(alg, tol=DEFAULT_TOL):
    """The algebra generated by the basis together with its adjoints."""
    if alg.dagger_closed:
        return alg
    mats = list(alg.basis) + [b.conj().T for b in alg.basis]
    seed_set = OperatorSet.from_matrices(mats)
    closed = generate_algebra(seed_set, tol)
    return replace(closed, generators=alg.generators, dagger_closed=True)


def jacobson_radical(alg, tol=DEFAULT_TOL):
    """Radical of the algebra, via the kernel of the trace bilinear form.

    For a unital subalgebra of complex matrices the radical equals
    {x in A : tr(x y) = 0 for all y in A}, computed as the null space of
    the Gram matrix G_ab = tr(B_a B_b) over the trace-orthonormal basis.
    Returned as a Subspace of vectorized matrices (ambient d*d).
    """
    if not alg.contains_identity:
        raise ValueError("radical requires the identity-adjoined algebra")
    mats = alg.basis
    # tr(B_a B_b) = sum_ij (B_a)_ij (B_b)_ji
    gram = np.einsum("aij,bji->ab", mats, mats)
    _, null = rank_and_nullspace(gram, tol)
    if null.dim == 0:
        return Subspace.empty(alg.dim * alg.dim)
    elems = np.tensordot(null.basis.T, mats, axes=(1, 0))  # (q, d, d)
    rows = _orthonormal_rows(_vec(elems), tol)
    return Subspace(rows.T)  # columns are vectorized radical elements


def zero_space(alg, tol=DEFAULT_TOL):
    """Common null space Z of all generators (equivalently of the algebra)."""
    stacked = np.vstack(list(alg.generators.operators))
    _, null = rank_and_nullspace(stacked, tol)
    return null


def semisimple_span(alg, radical, tol=DEFAULT_TOL):
    """Span S of the irreducible subspaces on which the algebra acts.

    N = common null space of the radical elements carries the semisimple
    action and splits (not necessarily orthogonally) as S plus the part of
    the null space Z it contains; S itself is recovered as the image A.N,
    which drops the Z directions where the original algebra acts as zero.
    """
    d = alg.dim
    if radical.dim == 0:
        nspace = Subspace.full(d)
    else:
        rad_mats = matrices_from_matrix_subspace(radical)
        _, nspace = rank_and_nullspace(np.vstack(list(rad_mats)), tol)
    if nspace.dim == 0:
        return Subspace.empty(d)
    gens = np.stack(list(alg.generators.operators))
    images = np.einsum("aij,jk->aik", gens, nspace.basis)
    images = np.transpose(images, (1, 0, 2)).reshape(d, -1)
    return Subspace.from_span(images, tol)


def is_invariant(alg, s, tol=DEFAULT_TOL):
    """Whether a subspace is invariant under the algebra, with residual."""
    if s.dim == 0:
        return True, 0.0
    proj = s.projector()
    comp = np.eye(alg.dim) - proj
    residual = 0.0
    for b in alg.basis:
        residual = max(residual, float(np.linalg.norm(comp @ b @ proj, 2)))
    return residual <= tol.eps_residual, residual


def algebra_structure(errs, tol=DEFAULT_TOL):
    """Generate the algebra and compute radical, Z and S in one pass."""
    alg = generate_algebra(errs, tol)
    unital = adjoin_identity(alg, tol)
    radical = jacobson_radical(unital, tol)
    z = zero_space(alg, tol)
    s = semisimple_span(alg, radical, tol)
    return alg, AlgebraStructure(radical=radical, zero_space=z, semisimple_span=s)
