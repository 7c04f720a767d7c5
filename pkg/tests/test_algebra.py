import numpy as np
import pytest

from subsys.algebra import (
    OperatorSet,
    adjoin_identity,
    algebra_structure,
    dagger_closure,
    generate_algebra,
    is_invariant,
    jacobson_radical,
    matrices_from_matrix_subspace,
    semisimple_span,
    zero_space,
)
from subsys.generators import collective

X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def test_operator_set_validation():
    with pytest.raises(ValueError):
        OperatorSet.from_matrices([np.zeros((2, 3))])
    with pytest.raises(ValueError):
        OperatorSet(dim=2, names=("a", "a"), operators=(X, Z))
    with pytest.raises(ValueError):
        OperatorSet.from_matrices([np.array([[np.nan, 0.0], [0.0, 0.0]])])
    ops = OperatorSet.from_matrices([X, Z])
    assert len(ops) == 2 and ops.dim == 2


def test_generate_full_matrix_algebra():
    alg = generate_algebra(OperatorSet.from_matrices([X, Z]))
    assert alg.nbasis == 4
    assert alg.dagger_closed
    assert alg.contains_identity
    # basis is trace-orthonormal
    gram = np.einsum("aij,bij->ab", alg.basis, alg.basis.conj())
    assert np.linalg.norm(gram - np.eye(4)) < 1e-10


def test_closure_under_products():
    rng = np.random.default_rng(0)
    mats = [rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)) for _ in range(2)]
    alg = generate_algebra(OperatorSet.from_matrices(mats))
    rows = alg.basis.reshape(alg.nbasis, -1)
    for a in alg.basis:
        for b in alg.basis:
            prod = (a @ b).reshape(-1)
            resid = prod - rows.T @ (rows.conj() @ prod)
            assert np.linalg.norm(resid) < 1e-8


def test_collective_algebra_dimension():
    # three-spin collective operators generate a 20-dim algebra: 4^2 + 2^2
    alg = generate_algebra(collective(3))
    assert alg.nbasis == 20
    assert alg.dagger_closed
    assert alg.contains_identity


def test_adjoin_identity():
    n = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    alg = generate_algebra(OperatorSet.from_matrices([n]))
    assert not alg.contains_identity
    ext = adjoin_identity(alg)
    assert ext.contains_identity
    assert ext.nbasis == alg.nbasis + 1


def test_dagger_closure():
    n = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    alg = generate_algebra(OperatorSet.from_matrices([n]))
    assert not alg.dagger_closed
    closed = dagger_closure(alg)
    assert closed.dagger_closed
    assert closed.nbasis >= alg.nbasis


def _block_upper_triangular_ops(seed, p, q, n_gens=2):
    """Generators of the full algebra {[[A, C], [0, B]]} on C^(p+q)."""
    rng = np.random.default_rng(seed)
    d = p + q
    mats = []
    for _ in range(n_gens):
        m = np.zeros((d, d), dtype=complex)
        m[:p, :p] = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
        m[p:, p:] = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        m[:p, p:] = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
        mats.append(m)
    return OperatorSet.from_matrices(mats)


def test_jacobson_radical_block_triangular():
    p, q = 2, 3
    ops = _block_upper_triangular_ops(1, p, q)
    alg = generate_algebra(ops)
    assert alg.nbasis == p * p + q * q + p * q
    radical = jacobson_radical(adjoin_identity(alg))
    assert radical.dim == p * q
    d = p + q
    for r in matrices_from_matrix_subspace(radical):
        assert np.linalg.norm(np.linalg.matrix_power(r, d)) < 1e-9


def test_radical_zero_for_dagger_closed():
    alg = generate_algebra(collective(3))
    radical = jacobson_radical(alg)
    assert radical.dim == 0


def test_semisimple_span_complements_radical():
    ops = _block_upper_triangular_ops(2, 2, 2)
    alg = generate_algebra(ops)
    radical = jacobson_radical(adjoin_identity(alg))
    s = semisimple_span(alg, radical)
    # only the first diagonal block carries an invariant irreducible copy;
    # the corner maps the second block into the first, so S is 2-dim
    assert s.dim == 2
    ok, residual = is_invariant(alg, s)
    assert ok, residual


def test_zero_space():
    rng = np.random.default_rng(3)
    # errors vanishing on the last coordinate
    mats = []
    for _ in range(2):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        m[:, 3] = 0.0
        mats.append(m)
    alg = generate_algebra(OperatorSet.from_matrices(mats))
    z = zero_space(alg)
    assert z.dim == 1
    assert abs(abs(z.basis[3, 0]) - 1.0) < 1e-10


def test_algebra_structure_bundle():
    ops = _block_upper_triangular_ops(4, 2, 2)
    alg, structure = algebra_structure(ops)
    assert structure.radical.dim == 4
    assert structure.zero_space.dim == 0
    assert structure.semisimple_span.dim == 2
