"""End-to-end acceptance gate.

Each test prints one pass/fail line for its criterion; assertions carry
the measured quantities so a failure is self-explanatory.
"""

import time
from dataclasses import replace

import numpy as np

from subsys.algebra import (
    OperatorSet,
    adjoin_identity,
    algebra_structure,
    generate_algebra,
    jacobson_radical,
    matrices_from_matrix_subspace,
)
from subsys.generators import (
    collective,
    planted_infeasible,
    planted_noiseless,
    planted_protectable,
    planted_similarity,
    repetition3,
    shor9_bitflip_sample,
)
from subsys.linalg import Subspace, subspace_distance
from subsys.noiseless import (
    SubsystemEncoding,
    component_rep_image,
    factorize_component,
    find_noiseless,
    isotypic_components,
    unitarize,
    verify_noiseless,
)
from subsys.protectable import (
    NOT_PROTECTABLE,
    PROTECTABLE,
    OrthoColumnInstance,
    check_protectable,
    ortho_to_projection,
    projection_defect,
    projection_to_ortho,
    verify_error_correcting,
)


def _line(num, ok, detail):
    print("criterion %2d: %s  (%s)" % (num, "PASS" if ok else "FAIL", detail))
    assert ok, "criterion %d failed: %s" % (num, detail)


def _component_profile(deco):
    return sorted((c.mult_dim, c.irrep_dim) for c in deco.components)


def test_criterion_1_collective_three_qubits():
    start = time.perf_counter()
    errs = collective(3)
    deco, encodings = find_noiseless(errs, seed=0)
    elapsed = time.perf_counter() - start
    profile = _component_profile(deco)
    real = [e for e in encodings if not e.trivial]
    best = max(e.n_logical for e in real)
    residual = max(verify_noiseless(e, errs) for e in real)
    ok = (
        profile == [(1, 4), (2, 2)]
        and best == 2
        and residual < 1e-9
        and elapsed < 5.0
    )
    _line(1, ok, "profile=%s best N=%d residual=%.2e time=%.2fs" % (profile, best, residual, elapsed))


def test_criterion_2_collective_four_qubits():
    start = time.perf_counter()
    errs = collective(4)
    deco, encodings = find_noiseless(errs, seed=0)
    elapsed = time.perf_counter() - start
    profile = _component_profile(deco)
    ns = sorted((e.n_logical for e in encodings if not e.trivial), reverse=True)
    residual = max(verify_noiseless(e, errs) for e in encodings if not e.trivial)
    ok = (
        profile == [(1, 5), (2, 1), (3, 3)]
        and ns[:2] == [3, 2]
        and residual < 1e-9
        and elapsed < 10.0
    )
    _line(2, ok, "profile=%s N values=%s residual=%.2e time=%.2fs" % (profile, ns, residual, elapsed))


def test_criterion_3_planted_noiseless_recovery():
    rng = np.random.default_rng(0xAC3)
    hits = 0
    worst = 0.0
    for i in range(50):
        n_comp = int(rng.integers(1, 4))
        while True:
            mults = [int(rng.integers(1, 4)) for _ in range(n_comp)]
            irreps = [int(rng.integers(1, 5)) for _ in range(n_comp)]
            d = sum(m * n for m, n in zip(mults, irreps))
            distinct = len({pair for pair in zip(mults, irreps)}) == n_comp
            if 2 <= d <= 12 and distinct:
                break
        errs, truth = planted_noiseless(i, mults, irreps)
        deco, encodings = find_noiseless(errs, seed=i)
        residual = max(
            (verify_noiseless(e, errs) for e in encodings if not e.trivial), default=0.0
        )
        worst = max(worst, residual)
        if _component_profile(deco) == truth and residual < 1e-9:
            hits += 1
    ok = hits == 50
    _line(3, ok, "exact recoveries %d/50, worst residual %.2e" % (hits, worst))


def test_criterion_4_unitarization():
    hits = 0
    worst_u = worst_fix = 0.0
    min_eig = np.inf
    for seed in range(20):
        r = np.random.default_rng([seed, 0xACC4])
        mult = int(r.integers(2, 4))
        irrep = int(r.integers(2, 4))
        errs, cptp, _ = planted_similarity(seed, mult=mult, irrep=irrep)
        alg, structure = algebra_structure(errs)
        comps = isotypic_components(alg, structure.semisimple_span, seed=seed)
        comp = factorize_component(alg, comps[0], seed=seed, force_general=True)
        # skew the factorization by an invertible Kronecker factor so the
        # input is genuinely non-unitary
        c = np.eye(mult) + 0.3 * (r.standard_normal((mult, mult)) + 1j * r.standard_normal((mult, mult)))
        s = np.eye(irrep) + 0.3 * (r.standard_normal((irrep, irrep)) + 1j * r.standard_normal((irrep, irrep)))
        comp = replace(comp, factor_map=comp.factor_map @ np.kron(c, s), unitary=False)
        images = [component_rep_image(comp, k) for k in cptp.operators]
        pair, fixed = unitarize(comp, list(cptp.operators))
        u = fixed.factor_map
        du = float(np.linalg.norm(u.conj().T @ u - np.eye(mult * irrep)))
        rho = pair.rho
        dfix = float(np.linalg.norm(sum(k.conj().T @ rho @ k for k in images) - rho))
        eig = float(np.linalg.eigvalsh(rho).min())
        worst_u = max(worst_u, du)
        worst_fix = max(worst_fix, dfix)
        min_eig = min(min_eig, eig)
        if du < 1e-8 and dfix < 1e-10 and eig > 0:
            hits += 1
    ok = hits == 20
    _line(4, ok, "%d/20, worst |U^dag U - I|=%.2e, worst fixed-point defect=%.2e, min eig=%.2e"
          % (hits, worst_u, worst_fix, min_eig))


def test_criterion_5_radical_dimension():
    rng = np.random.default_rng(0xAC5)
    hits = 0
    trials = 10
    worst_nilp = 0.0
    for _ in range(trials):
        p = int(rng.integers(1, 4))
        q = int(rng.integers(1, 4))
        if p * q > 10:
            q = 10 // p
        d = p + q
        mats = []
        for _ in range(2):
            m = np.zeros((d, d), dtype=complex)
            m[:p, :p] = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
            m[p:, p:] = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
            m[:p, p:] = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
            mats.append(m)
        alg = generate_algebra(OperatorSet.from_matrices(mats))
        radical = jacobson_radical(adjoin_identity(alg))
        nilp = max(
            float(np.linalg.norm(np.linalg.matrix_power(r, d)))
            for r in matrices_from_matrix_subspace(radical)
        )
        worst_nilp = max(worst_nilp, nilp)
        if radical.dim == p * q and nilp < 1e-9:
            hits += 1
    ok = hits == trials
    _line(5, ok, "%d/%d radical dims exact, worst |r^d|=%.2e" % (hits, trials, worst_nilp))


def test_criterion_6_protectability_round_trip():
    errs, enc = repetition3()
    verdict = check_protectable(enc, errs, seed=0)
    details = ["status=%s" % verdict.status]
    ok = verdict.status == PROTECTABLE
    if ok:
        cert = verdict.certificate
        target = np.zeros((8, 2), dtype=complex)
        target[0, 0] = 1.0
        target[7, 1] = 1.0
        dist = subspace_distance(cert.code, Subspace.from_span(target))
        # F_ij restricted to the code equal alpha_ij U
        n, s = enc.n_logical, enc.s_dim
        fit = 0.0
        for i, e in enumerate(errs.operators):
            compressed = enc.embed.conj().T @ e @ cert.code.basis
            blocks = compressed.reshape(n, s, n).transpose(1, 0, 2)
            for j in range(s):
                fit = max(fit, float(np.linalg.norm(blocks[j] - cert.alphas[i, j] * cert.isometry)))
        du = float(np.linalg.norm(cert.isometry.conj().T @ cert.isometry - np.eye(n)))
        total = sum(r.conj().T @ r for r in cert.recovery.operators)
        trace_excess = float(np.linalg.eigvalsh(total).max()) - 1.0
        composed = OperatorSet.from_matrices(
            [e @ r for e in errs.operators for r in cert.recovery.operators]
        )
        noiseless_resid = verify_noiseless(enc, composed)
        ok = (
            dist < 1e-8
            and fit < 1e-8
            and du < 1e-8
            and trace_excess < 1e-8
            and noiseless_resid < 1e-8
        )
        details.append(
            "code dist=%.2e fit=%.2e |U^dag U - I|=%.2e trace excess=%.2e noiseless=%.2e"
            % (dist, fit, du, trace_excess, noiseless_resid)
        )
    _line(6, ok, " ".join(details))


def test_criterion_7_verdict_soundness():
    false_neg = 0
    for seed in range(100):
        r = np.random.default_rng([seed, 0xACC7])
        dim = int(r.integers(5, 9))
        s_dim = int(r.integers(1, 3))
        errs, enc, _ = planted_protectable(seed, dim=dim, n_logical=2, s_dim=s_dim)
        if check_protectable(enc, errs, seed=seed).status == NOT_PROTECTABLE:
            false_neg += 1
    missed = 0
    for seed in range(100):
        kind = "small-preimage" if seed % 2 == 0 else "forced-zero"
        errs, enc = planted_infeasible(seed, kind=kind)
        if check_protectable(enc, errs, seed=seed).status != NOT_PROTECTABLE:
            missed += 1
    ok = false_neg == 0 and missed == 0
    _line(7, ok, "false negatives %d/100, undetected infeasible %d/100" % (false_neg, missed))


def test_criterion_8_reduction_equivalence():
    rng = np.random.default_rng(0xAC8)
    hits = 0
    worst = 0.0
    for trial in range(20):
        n = int(rng.integers(1, 4))
        e_dim = int(rng.integers(n, 5))
        k = int(rng.integers(2, 5))
        iso = np.linalg.qr(
            rng.standard_normal((e_dim, n)) + 1j * rng.standard_normal((e_dim, n))
        )[0][:, :n]
        rest = [
            rng.standard_normal((e_dim, n)) + 1j * rng.standard_normal((e_dim, n))
            for _ in range(k - 1)
        ]
        mats = [iso - 0.5 * rest[0], 0.5 * rest[0]] + rest[1:]
        alpha = np.zeros(k, dtype=complex)
        alpha[0] = alpha[1] = 1.0
        inst = OrthoColumnInstance(matrices=tuple(mats), budget=(64, 2000))
        # ortho solution -> projection solution
        proj = ortho_to_projection(inst)
        forward = projection_defect(proj, alpha.conj() / np.linalg.norm(alpha))
        # projection solution -> ortho solution of the re-derived instance
        back = projection_to_ortho(proj)
        t = np.tensordot(alpha, np.stack(back.matrices), axes=(0, 0))
        gram = t.conj().T @ t
        scale = np.trace(gram).real / n
        backward = float(np.linalg.norm(gram / scale - np.eye(n)))
        worst = max(worst, forward, backward)
        if forward < 1e-8 and backward < 1e-8:
            hits += 1
    ok = hits == 20
    _line(8, ok, "%d/20 round trips, worst residual %.2e" % (hits, worst))


def test_criterion_9_operator_qec_check():
    errs, _ = repetition3()
    code = np.zeros((8, 2), dtype=complex)
    code[0, 0] = 1.0
    code[7, 1] = 1.0
    code_enc = SubsystemEncoding(n_logical=2, s_dim=1, embed=code)
    ok_pass, _ = verify_error_correcting(code_enc, errs)
    z1 = np.diag([1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]).astype(complex)
    bad = OperatorSet.from_matrices([np.eye(8, dtype=complex), z1])
    ok_fail, bad_residual = verify_error_correcting(code_enc, bad)
    start = time.perf_counter()
    shor_errs, shor_enc = shor9_bitflip_sample()
    ok_shor, shor_residual = verify_error_correcting(shor_enc, shor_errs)
    elapsed = time.perf_counter() - start
    ok = ok_pass and (not ok_fail) and bad_residual > 0.1 and ok_shor and elapsed < 60.0
    _line(9, ok, "repetition pass=%s, Z1 residual=%.2f, 512-dim pass=%s residual=%.2e in %.1fs"
          % (ok_pass, bad_residual, ok_shor, shor_residual, elapsed))


def test_criterion_10_determinism():
    errs = collective(3)
    _, enc1 = find_noiseless(errs, seed=11)
    _, enc2 = find_noiseless(errs, seed=11)
    same_noiseless = len(enc1) == len(enc2) and all(
        np.array_equal(a.embed, b.embed)
        and verify_noiseless(a, errs) == verify_noiseless(b, errs)
        for a, b in zip(enc1, enc2)
        if not a.trivial
    )
    rerrs, renc = repetition3()
    v1 = check_protectable(renc, rerrs, seed=5)
    v2 = check_protectable(renc, rerrs, seed=5)
    same_protectable = (
        v1.status == v2.status
        and np.array_equal(v1.certificate.code.basis, v2.certificate.code.basis)
        and np.array_equal(v1.certificate.alphas, v2.certificate.alphas)
        and np.array_equal(v1.certificate.isometry, v2.certificate.isometry)
    )
    ok = same_noiseless and same_protectable
    _line(10, ok, "noiseless rerun identical=%s, protectable rerun identical=%s"
          % (same_noiseless, same_protectable))
