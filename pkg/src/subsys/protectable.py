"""Deciding initialization-protectability of a subsystem encoding.

Given errors E_i and an encoding H_P = (logical (x) cosubsystem) + rest,
the logical subsystem is protectable when some code D inside the common
preimage space V has all maps F_ij : psi -> <j|_S E_i |psi> proportional
to a single isometry.  The search is reduced in stages: rank pruning of
V, elimination of excess independent F maps, reduction to a pure
identity-projection problem for a structured density matrix, and finally
to finding a matrix with orthonormal columns in a matrix span, attacked
by a budgeted multi-start solver.  Negative verdicts come only from
exact linear algebra; solver exhaustion yields UNDECIDED.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import OperatorSet
from .errors import (
    DimensionMismatch,
    EmptyBasis,
    EnvironmentTooSmall,
    InfeasibleConstraints,
    NotPreserving,
    RowSpanDeficient,
)
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    orthonormal_columns,
    pseudo_inverse,
    rank_and_nullspace,
)
from .noiseless import SubsystemEncoding, verify_noiseless

__all__ = [
    "FMapFamily",
    "ProtectabilityCertificate",
    "ProjectionInstance",
    "OrthoColumnInstance",
    "ProtectVerdict",
    "PROTECTABLE",
    "NOT_PROTECTABLE",
    "UNDECIDED",
    "preimage_space",
    "build_f_maps",
    "prune_low_rank",
    "reduce_span_extm",
    "reduce_to_projection",
    "projection_to_ortho",
    "solve_ortho",
    "projection_solution_to_code",
    "check_protectable",
    "detecting_code_check",
    "reduced_detecting_operators",
    "verify_error_correcting",
    "extract_subsystem_from_decoder",
]

PROTECTABLE = "PROTECTABLE"
NOT_PROTECTABLE = "NOT_PROTECTABLE"
UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class FMapFamily:
    """The compressed error maps F_ij from V to the logical space."""

    n_logical: int  # N
    v_dim: int  # M
    v_basis: np.ndarray  # (d, M) orthonormal columns
    maps: np.ndarray  # (n_err, s, N, M)


@dataclass(frozen=True)
class ProtectabilityCertificate:
    code: Subspace  # dimension-N code in ambient coordinates
    isometry: np.ndarray  # N x N unitary from code coordinates to logical
    alphas: np.ndarray  # (n_err, s) proportionality scalars
    recovery: OperatorSet  # trace-non-increasing recovery elements


@dataclass(frozen=True)
class ProjectionInstance:
    """Pure identity-projection problem plus reduction bookkeeping."""

    rho_ab: np.ndarray  # density matrix on A (x) B, A of dim N, B of dim k
    constraint_rows: np.ndarray  # (r, k); admissible B-vectors satisfy L a = 0
    target: np.ndarray  # sigma; always the identity here
    n_logical: int
    block_dims: tuple  # N_i of the staircase blocks
    vc: np.ndarray  # (M, M) staircase change of V-basis
    gtilde: tuple  # gtilde[i] has shape (k, N_i, N); X_i = sum_m a_m gtilde[i][m]
    g_basis: tuple  # staircase-coordinate basis matrices G_i, for verification


@dataclass(frozen=True)
class OrthoColumnInstance:
    matrices: tuple  # equal-shape matrices M_j
    budget: tuple  # (restarts, iterations)


@dataclass(frozen=True)
class ProtectVerdict:
    status: str
    certificate: ProtectabilityCertificate | None = None
    reason: str = ""


def preimage_space(enc, errs, tol=DEFAULT_TOL):
    """Intersection V of the error preimages of the encoded subspace."""
    if enc.dim != errs.dim:
        raise DimensionMismatch(
            "encoding dimension %d != operator dimension %d" % (enc.dim, errs.dim)
        )
    proj = enc.projector()
    comp = np.eye(enc.dim) - proj
    stacked = np.vstack([comp @ e for e in errs.operators])
    _, null = rank_and_nullspace(stacked, tol)
    return null


def build_f_maps(enc, errs, v, tol=DEFAULT_TOL):
    """Assemble the maps F_ij : V -> logical space in the given bases.

    The errors reconstruct on V as E_i v = sum_j (F_ij v) (x) |j>_S.
    """
    if v.ambient_dim != errs.dim:
        raise DimensionMismatch("preimage space does not live in the operator space")
    n, s = enc.n_logical, enc.s_dim
    vb = v.basis
    maps = np.empty((len(errs.operators), s, n, vb.shape[1]), dtype=complex)
    for i, e in enumerate(errs.operators):
        compressed = enc.embed.conj().T @ e @ vb  # (N*s, M)
        maps[i] = compressed.reshape(n, s, vb.shape[1]).transpose(1, 0, 2)
    return FMapFamily(n_logical=n, v_dim=vb.shape[1], v_basis=vb, maps=maps)


def _restrict_family(fam, cols):
    """Re-express the family on a subspace of V with V-coordinate basis cols."""
    vb = fam.v_basis @ cols
    maps = fam.maps @ cols
    return FMapFamily(n_logical=fam.n_logical, v_dim=cols.shape[1], v_basis=vb, maps=maps)


def _span_basis(fam, tol):
    """Orthonormal basis matrices of span{F_ij} (trace inner product)."""
    flat = fam.maps.reshape(-1, fam.n_logical * fam.v_dim)
    basis = orthonormal_columns(flat.T, tol).T
    return basis.reshape(-1, fam.n_logical, fam.v_dim)


def _matrix_rank(m, tol):
    if m.size == 0:
        return 0
    rank, _ = rank_and_nullspace(m, tol)
    return rank


def prune_low_rank(fam, tol=DEFAULT_TOL, samples=16):
    """Shrink V by null spaces of rank-deficient elements of span{F_ij}.

    Every protecting code lies in the null space of any span element of
    rank below the logical dimension, so the pruning is sound.  The
    search covers the individual maps, a span basis, and seeded random
    combinations; it runs to a fixed point.
    """
    n = fam.n_logical
    rng = np.random.default_rng(0x10F)
    while fam.v_dim > 0:
        candidates = [m for block in fam.maps for m in block]
        basis = _span_basis(fam, tol)
        candidates.extend(basis)
        for _ in range(samples):
            c = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
            candidates.append(np.tensordot(c, basis, axes=(0, 0)))
        shrunk = False
        for g in candidates:
            if np.linalg.norm(g) <= tol.eps_rank:
                continue
            rank, null = rank_and_nullspace(g, tol)
            if rank < n and null.dim < fam.v_dim:
                fam = _restrict_family(fam, null.basis)
                shrunk = True
                break
        if not shrunk:
            break
    return Subspace(fam.v_basis), fam


def _low_rank_span_element(basis, tol):
    """A non-full-rank combination of independent N x M matrices, l >= M.

    With more matrices than columns the first rows are dependent; with
    exactly M, a determinant-zero pencil of the two row-slice matrices
    supplies a combination with a left null vector.
    """
    l, n, m = basis.shape
    if l > m:
        first_rows = basis[:, 0, :]  # (l, M)
        _, null = rank_and_nullspace(first_rows.T, tol)
        x = null.basis[:, 0]
        return np.tensordot(x, basis, axes=(0, 0))
    a1 = basis[:, 0, :]  # (M, M): row i is the first row of G_i
    a2 = basis[:, 1, :]
    vals = scipy.linalg.eigvals(a1, a2)
    finite = vals[np.isfinite(vals)]
    if len(finite):
        alpha, beta = 1.0, -finite[0]
    else:
        alpha, beta = 0.0, 1.0
    pencil = alpha * a1 + beta * a2
    _, null = rank_and_nullspace(pencil.T, tol)
    x = null.basis[:, 0]
    return np.tensordot(x, basis, axes=(0, 0))


def reduce_span_extm(fam, tol=DEFAULT_TOL):
    """Prune V until fewer than dim V independent maps remain.

    Whenever the span of the F_ij has at least M = dim V independent
    elements (and N > 1), it contains a nonzero element of rank below N
    whose null space must contain every protecting code.
    """
    found = []
    if fam.n_logical <= 1:
        return found, Subspace(fam.v_basis), fam
    guard = fam.v_dim + fam.maps.shape[0] * fam.maps.shape[1] + 2
    for _ in range(guard):
        if fam.v_dim == 0:
            break
        basis = _span_basis(fam, tol)
        if len(basis) < fam.v_dim:
            break
        g = _low_rank_span_element(basis[: fam.v_dim], tol)
        if np.linalg.norm(g) <= tol.eps_rank:
            break
        rank, null = rank_and_nullspace(g, tol)
        found.append(g)
        if null.dim == fam.v_dim:
            break
        fam = _restrict_family(fam, null.basis)
    return found, Subspace(fam.v_basis), fam


def _staircase(basis_mats, m, tol):
    """Orthonormal V-basis giving each G_i the block form [G_i1..G_ii 0..0].

    Built by successively orthonormalizing the conjugated rows of each
    basis matrix against the span already used; the i-th new block of
    columns carries the row-space increment of G_i.
    """
    blocks = []
    used = np.zeros((m, 0), dtype=complex)
    for g in basis_mats:
        rows = g.conj().T  # (M, N): row space of G as column vectors
        resid = rows - used @ (used.conj().T @ rows)
        floor = 1e3 * tol.eps_rank * max(1.0, float(np.linalg.norm(rows)))
        new = orthonormal_columns(resid, tol, floor=floor)
        blocks.append(new)
        used = np.concatenate([used, new], axis=1)
    return blocks, used


def reduce_to_projection(fam, tol=DEFAULT_TOL):
    """Reduce the protecting-code search to a pure identity-projection.

    A staircase change of V-basis lets the code equations a_i I = G_i X
    be solved block-by-block: each X_i = sum_m a_m Gtilde_im plus linear
    constraints L a = 0, and the residual orthonormality condition on X
    becomes a pure identity-projection problem for a structured density
    matrix on (logical) (x) (coefficient) space.
    """
    n, m = fam.n_logical, fam.v_dim
    basis = _span_basis(fam, tol)
    k = len(basis)
    blocks, vc_partial = _staircase(basis, m, tol)
    if vc_partial.shape[1] < m:
        raise RowSpanDeficient(
            "rows of the maps span only %d of %d dimensions" % (vc_partial.shape[1], m)
        )
    vc = vc_partial
    gs = tuple(g @ vc for g in basis)  # staircase coordinates
    dims = tuple(b.shape[1] for b in blocks)
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    eye = np.eye(n, dtype=complex)
    gtilde = []  # gtilde[i]: (k, N_i, N)
    constraint_rows = []
    for i in range(k):
        b = np.zeros((k, n, n), dtype=complex)
        b[i] = eye
        for j in range(i):
            gij = gs[i][:, offsets[j] : offsets[j + 1]]
            b -= np.einsum("pq,mqr->mpr", gij, gtilde[j])
        gii = gs[i][:, offsets[i] : offsets[i + 1]]
        gii_pinv = pseudo_inverse(gii, tol) if gii.size else np.zeros((0, n))
        perp = eye - gii @ gii_pinv if gii.size else eye
        rows = np.einsum("pq,mqr->mpr", perp, b).reshape(k, -1).T  # (N*N, k)
        norms = np.linalg.norm(rows, axis=1)
        keep = rows[norms > 1e3 * tol.eps_rank * max(1.0, norms.max(initial=0.0))]
        if len(keep):
            constraint_rows.append(orthonormal_columns(keep.T, tol).T)
        gtilde.append(np.einsum("pq,mqr->mpr", gii_pinv, b))
    if constraint_rows:
        lmat = np.vstack(constraint_rows)
    else:
        lmat = np.zeros((0, k), dtype=complex)
    _, feasible = rank_and_nullspace(lmat, tol) if lmat.size else (0, Subspace.full(k))
    if lmat.size and feasible.dim == 0:
        raise InfeasibleConstraints("elimination forces all coefficients to zero")
    rho4 = np.zeros((n, k, n, k), dtype=complex)
    for gt in gtilde:
        rho4 += np.einsum("jpa,mpb->ajbm", gt.conj(), gt)
    pb = feasible.projector() if lmat.size else np.eye(k, dtype=complex)
    rho4 = np.einsum("jq,aqbr,rm->ajbm", pb.conj().T, rho4, pb)
    rho = rho4.reshape(n * k, n * k)
    rho = (rho + rho.conj().T) / 2.0
    tr = np.trace(rho).real
    if tr <= k * n * tol.eps_rank * max(1.0, float(np.abs(rho).max(initial=0.0))):
        raise InfeasibleConstraints("constraints admit only codes mapped to zero")
    return ProjectionInstance(
        rho_ab=rho / tr,
        constraint_rows=lmat,
        target=np.eye(n),
        n_logical=n,
        block_dims=dims,
        vc=vc,
        gtilde=tuple(gtilde),
        g_basis=gs,
    )


def projection_to_ortho(inst, budget=(64, 2000), tol=DEFAULT_TOL):
    """Purify the density matrix and emit the orthonormal-columns instance.

    A B-state whose partial inner product with the purification is
    maximally entangled between A and the environment corresponds to a
    coefficient vector alpha with sum_j alpha_j M_j an isometry (up to
    scale); an environment smaller than A admits no solution.
    """
    n = inst.n_logical
    k = inst.rho_ab.shape[0] // n
    vals, vecs = np.linalg.eigh(inst.rho_ab)
    cutoff = tol.eps_rank * max(1.0, vals.max(initial=0.0)) * inst.rho_ab.shape[0]
    keep = vals > cutoff
    if keep.sum() < n:
        raise EnvironmentTooSmall(
            "purifying environment has dimension %d < %d" % (int(keep.sum()), n)
        )
    amps = vecs[:, keep] * np.sqrt(vals[keep])  # (N*k, E): m_{(a j), e}
    e_dim = amps.shape[1]
    tensor = amps.reshape(n, k, e_dim)  # m_{a j e}
    mats = tuple(tensor[:, j, :].T.copy() for j in range(k))  # (E, N) each
    return OrthoColumnInstance(matrices=mats, budget=budget)


def ortho_to_projection(inst):
    """Build the identity-projection instance equivalent to an ortho instance.

    Rescales the matrices to unit total weight, reads them as the
    coefficient tensor of a pure state on A (x) B (x) E, and traces out
    the environment; a B-vector solving the resulting pure
    identity-projection problem is the conjugate of a coefficient
    vector alpha with sum_j alpha_j M_j an isometry up to scale.
    """
    mats = np.stack([np.asarray(m, dtype=complex) for m in inst.matrices])
    k, e_dim, n = mats.shape
    weight = float(np.sum(np.abs(mats) ** 2))
    if weight <= 0:
        raise EmptyBasis("ortho instance has no nonzero matrices")
    tensor = mats.transpose(2, 0, 1) / np.sqrt(weight)  # m_{i j k'} = (M_j)_{k' i}
    rho = np.einsum("ijk,pqk->ijpq", tensor, tensor.conj()).reshape(n * k, n * k)
    return ProjectionInstance(
        rho_ab=rho,
        constraint_rows=np.zeros((0, k)),
        target=np.eye(n),
        n_logical=n,
        block_dims=(),
        vc=np.eye(k),
        gtilde=(),
        g_basis=(),
    )


def projection_defect(inst, phi):
    """Residual of a candidate B-vector for the identity-projection problem.

    Computes the A-side compression <phi| rho_AB |phi>, normalizes by
    its trace, and returns the distance to identity/N; zero means phi
    solves the instance exactly.
    """
    n = inst.n_logical
    k = inst.rho_ab.shape[0] // n
    phi = np.asarray(phi, dtype=complex).reshape(k)
    blocks = inst.rho_ab.reshape(n, k, n, k)
    m_a = np.einsum("j,ijpq,q->ip", phi.conj(), blocks, phi)
    tr = np.trace(m_a).real
    if tr <= 0:
        return np.inf
    return float(np.linalg.norm(m_a / tr - np.eye(n) / n))


def solve_ortho(inst, seed=0, tol=DEFAULT_TOL):
    """Search for alpha with sum_j alpha_j M_j having orthonormal columns.

    Multi-start alternating minimization: project the current combination
    onto the nearest scaled isometry (polar factor), then least-squares
    fit alpha to that target.  Success requires the squared defect of
    the normalized Gram matrix below 1e-18; exhaustion of the budget is
    NOT evidence of infeasibility.
    """
    mats = [np.asarray(m) for m in inst.matrices]
    k = len(mats)
    rows, cols = mats[0].shape
    if rows < cols:
        return None
    restarts, iters = inst.budget
    phi = np.stack([m.reshape(-1) for m in mats], axis=1)  # (rows*cols, k)
    phi_pinv = np.linalg.pinv(phi)

    def gram_defect(t):
        g = t.conj().T @ t
        s = np.trace(g).real / cols
        if s <= 0:
            return np.inf, 1.0
        return float(np.linalg.norm(g / s - np.eye(cols)) ** 2), s

    eps_found = 1e-18
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart, 0x0A])
        alpha = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        alpha /= np.linalg.norm(alpha)
        prev = np.inf
        stall = 0
        for _ in range(iters):
            t = np.tensordot(alpha, mats, axes=(0, 0))
            u, _, vh = np.linalg.svd(t, full_matrices=False)
            q = u @ vh
            alpha = phi_pinv @ q.reshape(-1)
            norm = np.linalg.norm(alpha)
            if norm == 0:
                break
            alpha /= norm
            f, _ = gram_defect(np.tensordot(alpha, mats, axes=(0, 0)))
            if f < eps_found:
                break
            stall = stall + 1 if f > prev * (1 - 1e-3) else 0
            prev = min(prev, f)
            if stall > 50:
                break
        t = np.tensordot(alpha, mats, axes=(0, 0))
        f, s = gram_defect(t)
        if f < eps_found:
            return alpha / np.sqrt(s)
    return None


def projection_solution_to_code(inst, alpha, tol=DEFAULT_TOL):
    """Map a coefficient vector back to an orthonormal code matrix X.

    Returns X in the original V coordinates with G_i X = a_i I and
    X^dag X = I, or None if the candidate fails those checks.
    """
    n = inst.n_logical
    if inst.constraint_rows.size:
        _, feasible = rank_and_nullspace(inst.constraint_rows, tol)
        alpha = feasible.projector() @ alpha
    blocks = [np.tensordot(alpha, gt, axes=(0, 0)) for gt in inst.gtilde]
    x = np.concatenate([b for b in blocks if b.shape[0]], axis=0)
    gram = x.conj().T @ x
    scale = np.trace(gram).real / n
    if scale <= tol.eps_rank:
        return None
    x = x / np.sqrt(scale)
    if np.linalg.norm(x.conj().T @ x - np.eye(n)) > 1e4 * tol.eps_residual:
        return None
    return inst.vc @ x


def _fit_isometry(kmaps, tol):
    """Fit K_ij ~ alpha_ij U with U unitary, gauge-fixed alphas."""
    n = kmaps.shape[-1]
    flat = kmaps.reshape(-1, n, n)
    lead = max(range(len(flat)), key=lambda i: np.linalg.norm(flat[i]))
    u, _, vh = np.linalg.svd(flat[lead])
    iso = u @ vh
    for _ in range(16):
        alphas = np.einsum("kpq,pq->k", flat, iso.conj()) / n
        acc = np.einsum("k,kpq->pq", alphas.conj(), flat)
        u, _, vh = np.linalg.svd(acc)
        iso = u @ vh
    alphas = np.einsum("kpq,pq->k", flat, iso.conj()) / n
    lead = int(np.argmax(np.abs(alphas)))
    phase = alphas[lead] / abs(alphas[lead]) if abs(alphas[lead]) > 0 else 1.0
    iso = iso * phase
    alphas = alphas / phase
    residual = max(
        float(np.linalg.norm(f - a * iso)) for f, a in zip(flat, alphas)
    )
    return iso, alphas.reshape(kmaps.shape[:-2]), residual


def _build_certificate(enc, errs, code_cols, tol):
    """Certificate (code, isometry, alphas, recovery) for a candidate code.

    Returns None when the maps restricted to the code are not all
    proportional to one unitary within tolerance, or when the recovery
    fails the end-to-end noiselessness check.
    """
    n, s = enc.n_logical, enc.s_dim
    d = enc.dim
    kmaps = np.empty((len(errs.operators), s, n, n), dtype=complex)
    for i, e in enumerate(errs.operators):
        compressed = enc.embed.conj().T @ e @ code_cols  # (N*s, N)
        kmaps[i] = compressed.reshape(n, s, n).transpose(1, 0, 2)
    iso, alphas, residual = _fit_isometry(kmaps, tol)
    if residual > 10 * tol.eps_residual:
        return None
    recov = []
    for t in range(s):
        sel = np.kron(np.eye(n), np.eye(s)[t : t + 1])  # (N, N*s)
        recov.append(code_cols @ iso.conj().T @ sel @ enc.embed.conj().T)
    total = sum(r.conj().T @ r for r in recov)
    completion = np.eye(d) - total
    completion = (completion + completion.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(completion)
    # square roots amplify round-off: eigenvalues at noise scale are zero
    vals = np.where(vals > 1e3 * tol.eps_rank * max(1.0, float(np.abs(vals).max())), vals, 0.0)
    root = (vecs * np.sqrt(vals)) @ vecs.conj().T
    names = tuple("recover_%d" % t for t in range(s)) + ("completion",)
    recovery = OperatorSet(dim=d, names=names, operators=tuple(recov) + (root,))
    pair_ops = [
        e @ r for e in errs.operators for r in recovery.operators
    ]
    pair_set = OperatorSet.from_matrices(pair_ops)
    if verify_noiseless(enc, pair_set, tol) > 10 * tol.eps_residual:
        return None
    return ProtectabilityCertificate(
        code=Subspace(code_cols), isometry=iso, alphas=alphas, recovery=recovery
    )


def _attempt_pipeline(enc, errs, v, seed, budget, tol):
    """Run pruning + reductions + solver on a given V; returns a verdict.

    A NOT_PROTECTABLE from this pipeline is exact for codes inside V.
    """
    n = enc.n_logical
    fam = build_f_maps(enc, errs, v, tol)
    v, fam = prune_low_rank(fam, tol)
    if fam.v_dim < n:
        return ProtectVerdict(NOT_PROTECTABLE, reason="preimage space smaller than the code after rank pruning")
    _, v, fam = reduce_span_extm(fam, tol)
    if fam.v_dim < n:
        return ProtectVerdict(NOT_PROTECTABLE, reason="preimage space smaller than the code after span reduction")
    if n == 1:
        code_cols = fam.v_basis[:, :1]
        cert = _build_certificate(enc, errs, code_cols, tol)
        if cert is not None:
            return ProtectVerdict(PROTECTABLE, certificate=cert)
        return ProtectVerdict(UNDECIDED, reason="one-dimensional candidate failed verification")
    try:
        inst = reduce_to_projection(fam, tol)
    except RowSpanDeficient as exc:
        return ProtectVerdict(UNDECIDED, reason=str(exc))
    except InfeasibleConstraints as exc:
        return ProtectVerdict(NOT_PROTECTABLE, reason=str(exc))
    try:
        ortho = projection_to_ortho(inst, budget=budget, tol=tol)
    except EnvironmentTooSmall as exc:
        return ProtectVerdict(NOT_PROTECTABLE, reason=str(exc))
    alpha = solve_ortho(ortho, seed=seed, tol=tol)
    if alpha is None:
        return ProtectVerdict(UNDECIDED, reason="solver budget exhausted")
    x = projection_solution_to_code(inst, np.conj(alpha), tol)
    if x is None:
        return ProtectVerdict(UNDECIDED, reason="solver output failed the exact re-check")
    cert = _build_certificate(enc, errs, fam.v_basis @ x, tol)
    if cert is None:
        return ProtectVerdict(UNDECIDED, reason="candidate code failed certificate verification")
    return ProtectVerdict(PROTECTABLE, certificate=cert)


def check_protectable(enc, errs, seed=0, budget=(64, 2000), tol=DEFAULT_TOL):
    """Decide whether the encoded logical subsystem is protectable.

    PROTECTABLE comes with a verified certificate; NOT_PROTECTABLE only
    from exact facts (preimage too small, infeasible elimination,
    deficient purification rank); UNDECIDED when the open orthonormal-
    columns search runs out of budget.
    """
    n = enc.n_logical
    v = preimage_space(enc, errs, tol)
    if v.dim < n:
        return ProtectVerdict(
            NOT_PROTECTABLE,
            reason="preimage space has dimension %d < %d" % (v.dim, n),
        )
    fam = build_f_maps(enc, errs, v, tol)
    # degenerate path: a code on which every error has zero probability
    stacked = fam.maps.reshape(-1, fam.v_dim)
    _, common_null = rank_and_nullspace(stacked, tol)
    if common_null.dim >= n:
        code_cols = fam.v_basis @ common_null.basis[:, :n]
        cert = _build_certificate(enc, errs, code_cols, tol)
        if cert is not None:
            return ProtectVerdict(PROTECTABLE, certificate=cert)
    verdict = _attempt_pipeline(enc, errs, v, seed, budget, tol)
    if verdict.reason.startswith("rows of the maps span") and common_null.dim > 0:
        # retry on the complement of the common null space; sufficient only,
        # so a negative outcome downgrades to UNDECIDED
        _, row_span = rank_and_nullspace(common_null.basis.conj().T, tol)
        sub_v = Subspace(fam.v_basis @ row_span.basis)
        if sub_v.dim >= n:
            retry = _attempt_pipeline(enc, errs, sub_v, seed, budget, tol)
            if retry.status == PROTECTABLE:
                return retry
            return ProtectVerdict(UNDECIDED, reason=retry.reason)
    return verdict


def detecting_code_check(ops, code, tol=DEFAULT_TOL):
    """Check the error-detection condition P O P = c_O P for each operator."""
    p = code.projector()
    dim = code.dim
    worst = 0.0
    for o in ops.operators:
        pop = p @ o @ p
        c = np.trace(pop) / dim
        worst = max(worst, float(np.linalg.norm(pop - c * p)))
    return worst <= tol.eps_residual, worst


def reduced_detecting_operators(fam):
    """The reduced detection list {F_ij^dag F_ij} + {F_ij^dag F_next(ij)}."""
    flat = fam.maps.reshape(-1, fam.n_logical, fam.v_dim)
    ops = [f.conj().T @ f for f in flat]
    ops += [f.conj().T @ flat[(i + 1) % len(flat)] for i, f in enumerate(flat)]
    return OperatorSet.from_matrices(ops)


def verify_error_correcting(enc, errs, tol=DEFAULT_TOL):
    """Operator error-correction criterion for a subsystem encoding.

    Each compression embed^dag E_i^dag E_j embed must act as identity on
    the logical factor; the worst best-fit residual is returned.
    """
    n, s = enc.n_logical, enc.s_dim
    worst = 0.0
    for ei in errs.operators:
        for ej in errs.operators:
            m = enc.embed.conj().T @ ei.conj().T @ ej @ enc.embed
            blocks = m.reshape(n, s, n, s)
            g = np.einsum("aiaj->ij", blocks) / n
            worst = max(worst, float(np.linalg.norm(m - np.kron(np.eye(n), g))))
    return worst <= tol.eps_residual, worst


def extract_subsystem_from_decoder(encoders, errs, decoder, tol=DEFAULT_TOL):
    """Recover the subsystem encoding implied by a working decoder.

    Checks that every decoded encode-error path acts as identity (x)
    fixed ancilla state, builds the space S of ancilla vectors phi with
    (logical (x) phi) inside the decoder's range, and pulls S back to a
    subsystem encoding of the physical space.
    """
    decoder = np.asarray(decoder, dtype=complex)
    mats = [np.asarray(c, dtype=complex) for c in encoders]
    n_i = mats[0].shape[1]
    a_dim = decoder.shape[0] // n_i
    phis = np.zeros((len(mats), len(errs.operators), a_dim), dtype=complex)
    for i, c in enumerate(mats):
        for j, e in enumerate(errs.operators):
            t = (decoder @ e @ c).reshape(n_i, a_dim, n_i)
            phi = np.einsum("kak->a", t) / n_i
            defect = t - np.einsum("km,a->kam", np.eye(n_i), phi)
            dev = float(np.linalg.norm(defect))
            if dev > 1e3 * tol.eps_residual * max(1.0, float(np.linalg.norm(t))):
                raise NotPreserving(
                    "decoded action is not identity (x) fixed state",
                    encoder_index=i,
                    error_index=j,
                    witness=defect,
                )
            phis[i, j] = phi
    range_proj = decoder @ decoder.conj().T
    comp = np.eye(range_proj.shape[0]) - range_proj
    slices = [
        comp @ np.kron(np.eye(n_i)[:, k : k + 1], np.eye(a_dim)) for k in range(n_i)
    ]
    _, s_space = rank_and_nullspace(np.vstack(slices), tol)
    sb = s_space.basis  # (a_dim, s')
    s_dim = sb.shape[1]
    embed_cols = decoder.conj().T @ np.kron(np.eye(n_i), sb)  # columns k*s'+t
    enc = SubsystemEncoding(
        n_logical=n_i,
        s_dim=s_dim,
        embed=embed_cols,
        provenance="extracted from decoder",
    )
    phi_primes = np.einsum("ua,iju->ija", sb.conj(), phis)
    return enc, phi_primes
