from dataclasses import replace

import numpy as np
import pytest

from subsys.algebra import OperatorSet, algebra_structure, generate_algebra
from subsys.errors import LambdaTooLarge
from subsys.generators import (
    collective,
    planted_noiseless,
    planted_similarity,
)
from subsys.linalg import DEFAULT_TOL, Subspace
from subsys.noiseless import (
    channel_fixed_point,
    component_rep_image,
    factorize_component,
    find_noiseless,
    isotypic_components,
    make_cptp,
    unitarize,
    verify_noiseless,
)


def _profile(components):
    return sorted((c.mult_dim, c.irrep_dim) for c in components)


def test_isotypic_components_collective3():
    alg, structure = algebra_structure(collective(3))
    comps = isotypic_components(alg, structure.semisimple_span, seed=0)
    assert _profile(comps) == [(1, 4), (2, 2)]
    total = sum(c.dim for c in comps)
    assert total == 8


def test_factorize_component_collective3():
    errs = collective(3)
    alg, structure = algebra_structure(errs)
    comps = isotypic_components(alg, structure.semisimple_span, seed=1)
    for comp in comps:
        comp = factorize_component(alg, comp, seed=1)
        assert comp.unitary
        u = comp.factor_map
        assert np.linalg.norm(u.conj().T @ u - np.eye(comp.dim)) < 1e-9
        # rep images are multiplicative: R(AB) = R(A) R(B)
        a, b = errs.operators[0], errs.operators[1]
        ra = component_rep_image(comp, a)
        rb = component_rep_image(comp, b)
        rab = component_rep_image(comp, a @ b)
        assert np.linalg.norm(rab - ra @ rb) < 1e-8


def test_planted_noiseless_recovery():
    for seed, mults, irreps in [(0, [2, 1], [2, 4]), (1, [3], [2]), (2, [1, 2], [3, 2])]:
        errs, truth = planted_noiseless(seed, mults, irreps)
        deco, encodings = find_noiseless(errs, seed=seed)
        assert _profile(deco.components) == truth
        real = [e for e in encodings if not e.trivial]
        assert len(real) == len(truth)
        for e in real:
            assert verify_noiseless(e, errs) < 1e-9


def test_find_noiseless_reports_zero_space():
    rng = np.random.default_rng(0)
    mats = []
    for _ in range(2):
        m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        m[:, 4] = 0.0
        mats.append(m)
    errs = OperatorSet.from_matrices(mats)
    _, encodings = find_noiseless(errs, seed=0)
    trivials = [e for e in encodings if e.trivial]
    assert len(trivials) == 1
    assert trivials[0].n_logical == 1 and trivials[0].s_dim == 1


def test_encoding_ranking():
    errs, _ = planted_noiseless(5, [3, 1], [2, 5])
    _, encodings = find_noiseless(errs, seed=5)
    logical_dims = [e.n_logical for e in encodings]
    assert logical_dims == sorted(logical_dims, reverse=True)


def test_make_cptp():
    errs = collective(3)
    ops = make_cptp(errs, 0.05)
    total = sum(e.conj().T @ e for e in ops.operators)
    assert np.linalg.norm(total - np.eye(8)) < 1e-12
    with pytest.raises(LambdaTooLarge):
        make_cptp(errs, 1e6)
    with pytest.raises(ValueError):
        make_cptp(errs, -1.0)


def test_channel_fixed_point_unital():
    # Kraus images of a random unitary channel: fixed point is I/n
    rng = np.random.default_rng(7)
    u = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    # extend by products of two unitaries so the images span B(C^3)
    v = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    images = [u / np.sqrt(2), v / np.sqrt(2)]
    prods = [a @ b for a in images for b in images]
    # two levels: rescale so the collected set stays trace-preserving
    rho = channel_fixed_point([k / np.sqrt(2) for k in images + prods])
    target = np.eye(3) / 3.0
    assert np.linalg.norm(rho - target) < 1e-10


def _skewed_component(alg, comp, seed):
    """Factorize via the intertwiner path and skew by an invertible kron."""
    comp = factorize_component(alg, comp, seed=seed, force_general=True)
    rng = np.random.default_rng([seed, 0xBE])
    m, n = comp.mult_dim, comp.irrep_dim
    c = np.eye(m) + 0.3 * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    s = np.eye(n) + 0.3 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    u = comp.factor_map @ np.kron(c, s)
    unitary = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) < 1e-8
    return replace(comp, factor_map=u, unitary=unitary)


def test_unitarize_similarity_plant():
    for seed in range(3):
        errs, cptp, _ = planted_similarity(seed, mult=2, irrep=3)
        alg, structure = algebra_structure(errs)
        comps = isotypic_components(alg, structure.semisimple_span, seed=seed)
        assert len(comps) == 1 and comps[0].mult_dim == 2 and comps[0].irrep_dim == 3
        comp = _skewed_component(alg, comps[0], seed)
        assert not comp.unitary
        pair, fixed = unitarize(comp, list(cptp.operators))
        u = fixed.factor_map
        assert np.linalg.norm(u.conj().T @ u - np.eye(6)) < 1e-8
        # the fixed point is a strictly positive density matrix
        vals = np.linalg.eigvalsh(pair.rho)
        assert vals.min() > 0
        assert abs(np.trace(pair.rho) - 1.0) < 1e-10


def test_verify_noiseless_rejects_wrong_encoding():
    errs, _ = planted_noiseless(3, [2], [3])
    deco, encodings = find_noiseless(errs, seed=3)
    good = encodings[0]
    assert verify_noiseless(good, errs) < 1e-9
    # scramble the embedding: residual becomes order one
    rng = np.random.default_rng(11)
    q = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))[0]
    bad = replace(good, embed=q[:, : good.embed.shape[1]])
    assert verify_noiseless(bad, errs) > 1e-2


def test_find_noiseless_cptp_lambda():
    # non-CPTP similarity errors become analyzable after completion
    errs, _, _ = planted_similarity(4, mult=2, irrep=2)
    _, encodings = find_noiseless(errs, seed=4, cptp_lambda=0.1)
    assert any(e.n_logical == 2 and e.s_dim >= 2 and not e.trivial for e in encodings)
