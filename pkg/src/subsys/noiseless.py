"""Finding, factorizing and verifying noiseless subsystems.

Pipeline: generate the error algebra, split off the null space Z and the
semisimple span S, decompose S into isotypic components with a randomized
spectral method, factorize each component as (multiplicity space) tensor
(irreducible space), and make the factorization unitary -- directly when
the algebra is dagger-closed, through the channel fixed point when the
errors come from a quantum operation, or through a verified dagger-closure
fallback otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .algebra import OperatorSet, algebra_structure, generate_algebra
from .errors import (
    LambdaTooLarge,
    NoPositiveFixedPoint,
    NotIsotypic,
    NotKroneckerFactorable,
    NotUniqueFixedPoint,
    RetriesExhausted,
)
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    generalized_eigenspaces,
    hermitian_eigenspaces,
    orthonormal_columns,
    random_hermitian_in_span,
    rank_and_nullspace,
)

__all__ = [
    "IsotypicComponent",
    "SubsystemDecomposition",
    "SubsystemEncoding",
    "FixedPointPair",
    "isotypic_components",
    "factorize_component",
    "channel_fixed_point",
    "unitarize",
    "find_noiseless",
    "verify_noiseless",
    "make_cptp",
    "component_rep_image",
]

_EQUAL_SPACE_TOL = 1e-7


@dataclass(frozen=True)
class IsotypicComponent:
    """One isotypic block: an invariant subspace factoring as J (x) S0."""

    index: int
    space: Subspace  # (d, mult_dim * irrep_dim) in ambient coordinates
    mult_dim: int
    irrep_dim: int
    factor_map: np.ndarray | None = None  # U in component coordinates
    unitary: bool = False
    provenance: str = ""

    @property
    def dim(self):
        return self.mult_dim * self.irrep_dim


@dataclass(frozen=True)
class SubsystemEncoding:
    """A subsystem encoding H_P = (logical (x) cosubsystem) + remainder."""

    n_logical: int
    s_dim: int
    embed: np.ndarray  # (d, n_logical * s_dim), isometry
    trivial: bool = False  # true for the zero-probability Z subspace
    provenance: str = ""
    component_index: int = -1

    @property
    def dim(self):
        return self.embed.shape[0]

    def projector(self):
        return self.embed @ self.embed.conj().T


@dataclass(frozen=True)
class SubsystemDecomposition:
    components: tuple
    zero_space: Subspace
    remainder: Subspace


@dataclass(frozen=True)
class FixedPointPair:
    """Fixed point data of Lemma-style unitarization: U (W (x) V) unitary."""

    rho: np.ndarray  # trace-1 positive fixed point on the irreducible factor
    rho_prime: np.ndarray  # strictly positive factor on the multiplicity space
    w: np.ndarray  # rho_prime^(-1/2)
    v: np.ndarray  # rho^(-1/2)


def _restricted_basis(basis_mats, q, tol):
    """Algebra basis compressed to an invariant subspace with frame q."""
    restricted = np.einsum("pi,aij,jq->apq", q.conj().T, basis_mats, q)
    rows = restricted.reshape(restricted.shape[0], -1)
    rows = orthonormal_columns(rows.T, tol).T
    k = q.shape[1]
    return rows.reshape(-1, k, k)


def _grow_invariant(v0, mats, tol):
    """Close a subspace under multiplication by the given matrices."""
    basis = orthonormal_columns(v0, tol)
    while True:
        images = np.concatenate([basis] + [m @ basis for m in mats], axis=1)
        grown = orthonormal_columns(images, tol)
        if grown.shape[1] == basis.shape[1]:
            return grown
        basis = grown


def _same_space(a, b):
    if a.shape[1] != b.shape[1]:
        return False
    pa = a @ a.conj().T
    pb = b @ b.conj().T
    return np.linalg.norm(pa - pb, 2) < _EQUAL_SPACE_TOL


def isotypic_components(alg, semisimple, seed=0, tol=DEFAULT_TOL):
    """Decompose the semisimple span into isotypic components.

    A random element of the algebra restricted to S typically has
    generalized eigenspaces that grow (under algebra multiplication) into
    exactly the isotypic components; draws failing that typicality test
    are retried with a fresh derived seed.
    """
    if semisimple.dim == 0:
        return []
    q = semisimple.basis
    rmats = _restricted_basis(alg.basis, q, tol)
    ns = q.shape[1]
    last_failure = "no attempts"
    for attempt in range(tol.max_retries):
        rng = np.random.default_rng([seed, attempt, 0x150])
        coeffs = rng.standard_normal(len(rmats)) + 1j * rng.standard_normal(len(rmats))
        element = np.tensordot(coeffs, rmats, axes=(0, 0))
        try:
            spaces = generalized_eigenspaces(element, tol)
        except Exception as exc:  # clustering failures are retryable
            last_failure = str(exc)
            continue
        grown = [_grow_invariant(s.basis, list(rmats), tol) for _, s in spaces]
        distinct = []
        ok = True
        for g in grown:
            if any(_same_space(g, h) for h in distinct):
                continue
            # a partial overlap with an existing component is atypical
            if any(
                Subspace(g).intersect(Subspace(h), tol).dim not in (0, g.shape[1])
                for h in distinct
            ):
                ok = False
                break
            distinct.append(g)
        if not ok:
            last_failure = "overlapping non-identical components"
            continue
        total = np.concatenate(distinct, axis=1)
        if sum(g.shape[1] for g in distinct) != ns or orthonormal_columns(total, tol).shape[1] != ns:
            last_failure = "components do not span the semisimple span"
            continue
        comps = []
        for g in distinct:
            sub = _restricted_basis(rmats, g, tol)
            n = int(round(np.sqrt(sub.shape[0])))
            if n * n != sub.shape[0] or g.shape[1] % n != 0:
                comps = None
                last_failure = "restricted algebra dimension is not a square"
                break
            comps.append(
                IsotypicComponent(
                    index=len(comps),
                    space=Subspace(q @ g),
                    mult_dim=g.shape[1] // n,
                    irrep_dim=n,
                )
            )
        if comps is not None:
            return comps
    raise RetriesExhausted("isotypic decomposition failed: %s" % last_failure)


def _two_hermitian_factorization(cmats, mult, irrep, seed, tol):
    """Unitary factorization of a dagger-closed isotypic component.

    Eigenspaces of a random Hermitian element slice the component into
    multiplicity-dimensional blocks; the blocks of a second random
    Hermitian element supply consistent intertwining isometries.
    """
    mn = mult * irrep
    if irrep == 1 or mult * irrep == irrep:
        # scalar action or multiplicity one: the identity frame works
        return np.eye(mn, dtype=complex)
    scale = max(float(np.linalg.norm(cmats)), 1.0)
    for attempt in range(tol.max_retries):
        h2 = random_hermitian_in_span(list(cmats), [seed, attempt, 0x2A])
        spaces = hermitian_eigenspaces(h2, tol)
        if len(spaces) != irrep or any(s.dim != mult for _, s in spaces):
            continue
        frames = [s.basis for _, s in spaces]
        h2p = random_hermitian_in_span(list(cmats), [seed, attempt, 0x2B])
        links = [np.eye(mult, dtype=complex)]
        good = True
        for i in range(1, irrep):
            block = frames[i].conj().T @ h2p @ frames[0]
            x, sing, yh = np.linalg.svd(block)
            if sing[0] < 1e-6 * scale or (sing[0] - sing[-1]) > 1e-6 * sing[0]:
                good = False
                break
            links.append(x @ yh)
        if not good:
            continue
        u = np.empty((mn, mn), dtype=complex)
        for i in range(irrep):
            cols = frames[i] @ links[i]
            for a in range(mult):
                u[:, a * irrep + i] = cols[:, a]
        return u
    raise RetriesExhausted("two-Hermitian factorization kept drawing degenerate elements")


def _commutant_basis(cmats, tol):
    mn = cmats.shape[1]
    eye = np.eye(mn)
    blocks = [np.kron(c, eye) - np.kron(eye, c.T) for c in cmats]
    _, null = rank_and_nullspace(np.vstack(blocks), tol)
    return null.basis.T.reshape(-1, mn, mn)


def _intertwiner_factorization(cmats, mult, irrep, seed, tol):
    """Invertible factorization of a general isotypic component.

    Finds one irreducible subspace from a random commutant element, then
    spans the intertwiner space Hom(S0, component) to assemble U with
    A U = U (I (x) R(A)).
    """
    mn = mult * irrep
    comm = _commutant_basis(cmats, tol)
    for attempt in range(tol.max_retries):
        rng = np.random.default_rng([seed, attempt, 0x17])
        coeffs = rng.standard_normal(len(comm)) + 1j * rng.standard_normal(len(comm))
        element = np.tensordot(coeffs, comm, axes=(0, 0))
        try:
            spaces = generalized_eigenspaces(element, tol)
        except Exception:
            continue
        w0 = None
        for _, s in spaces:
            if s.dim == irrep:
                w0 = s.basis
                break
        if w0 is None:
            continue
        reps = np.einsum("pi,aij,jq->apq", w0.conj().T, cmats, w0)
        eye_n = np.eye(irrep)
        eye_mn = np.eye(mn)
        blocks = [
            np.kron(c, eye_n) - np.kron(eye_mn, r.T) for c, r in zip(cmats, reps)
        ]
        _, hom = rank_and_nullspace(np.vstack(blocks), tol)
        if hom.dim != mult:
            raise NotIsotypic(
                "intertwiner space has dimension %d, expected multiplicity %d"
                % (hom.dim, mult)
            )
        tmats = hom.basis.T.reshape(mult, mn, irrep)
        u = np.concatenate(list(tmats), axis=1)
        if np.linalg.cond(u) > 1.0 / tol.eps_rank:
            continue
        return u / np.linalg.norm(u, 2)
    raise RetriesExhausted("intertwiner factorization failed its typicality checks")


def _rep_image_from_factor(u, u_inv, compressed, mult, irrep):
    m = u_inv @ compressed @ u
    blocks = m.reshape(mult, irrep, mult, irrep)
    r = np.einsum("aiaj->ij", blocks) / mult
    defect = float(np.linalg.norm(m - np.kron(np.eye(mult), r)))
    return r, defect


def component_rep_image(comp, op):
    """Image R(op) of an algebra element on the irreducible factor."""
    q = comp.space.basis
    compressed = q.conj().T @ op @ q
    u_inv = np.linalg.inv(comp.factor_map)
    r, _ = _rep_image_from_factor(comp.factor_map, u_inv, compressed, comp.mult_dim, comp.irrep_dim)
    return r


def factorize_component(alg, comp, seed=0, tol=DEFAULT_TOL, force_general=False):
    """Fill the J (x) S0 factorization map of an isotypic component.

    Dagger-closed restrictions get the randomized two-Hermitian procedure
    (U comes out unitary); general restrictions get an intertwiner-space
    construction (U invertible, unitarity flagged).  force_general skips
    the dagger-closure shortcut.
    """
    q = comp.space.basis
    cmats = _restricted_basis(alg.basis, q, tol)
    rows = cmats.reshape(cmats.shape[0], -1)
    daggers = np.conj(np.transpose(cmats, (0, 2, 1))).reshape(cmats.shape[0], -1)
    resid = daggers - (daggers @ rows.conj().T) @ rows
    closed = not force_general and float(np.linalg.norm(resid)) <= tol.eps_residual * max(
        1.0, float(np.linalg.norm(daggers))
    )
    if closed:
        u = _two_hermitian_factorization(cmats, comp.mult_dim, comp.irrep_dim, seed, tol)
        provenance = "dagger-closed"
    else:
        u = _intertwiner_factorization(cmats, comp.mult_dim, comp.irrep_dim, seed, tol)
        provenance = "general"
    unitary = (
        float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))) <= 10 * tol.eps_residual
    )
    return replace(comp, factor_map=u, unitary=unitary, provenance=provenance)


def channel_fixed_point(kraus_images, tol=DEFAULT_TOL):
    """Unique trace-1 positive fixed point of X -> sum_i K_i^dag X K_i.

    The map is vectorized to a superoperator and the eigenvalue-1
    eigenvector extracted; multiplicity above one (spanning hypothesis
    violated) raises NotUniqueFixedPoint, and a fixed point without full
    support raises NoPositiveFixedPoint.
    """
    mats = [np.asarray(k, dtype=complex) for k in kraus_images]
    n = mats[0].shape[0]
    superop = sum(np.kron(k.conj().T, k.T) for k in mats)
    vals, vecs = np.linalg.eig(superop)
    width = tol.cluster_width(1.0)
    at_one = np.where(np.abs(vals - 1.0) <= width)[0]
    if len(at_one) == 0:
        raise NoPositiveFixedPoint("no eigenvalue 1 of the channel superoperator")
    if len(at_one) > 1:
        raise NotUniqueFixedPoint(
            "eigenvalue 1 has multiplicity %d; Kraus images do not span" % len(at_one)
        )
    rho = vecs[:, at_one[0]].reshape(n, n)
    rho = (rho + rho.conj().T) / 2.0
    tr = np.trace(rho)
    if abs(tr) < tol.eps_residual:
        raise NoPositiveFixedPoint("fixed point has vanishing trace")
    rho = rho / tr
    eigvals = np.linalg.eigvalsh(rho)
    if eigvals.min() <= tol.eps_residual:
        raise NoPositiveFixedPoint(
            "fixed point is not strictly positive (min eigenvalue %g)" % eigvals.min()
        )
    residual = np.linalg.norm(sum(k.conj().T @ rho @ k for k in mats) - rho)
    if residual > 10 * tol.eps_residual:
        raise NoPositiveFixedPoint("fixed point residual %g" % residual)
    return rho


def _spanning_rep_images(comp, kraus_ops, tol):
    """Represented Kraus images, extended by products until they span B(S0).

    Products of operation elements are again operation elements (of the
    composed operation), so extending by products preserves the existence
    of an underlying quantum operation while forcing the span condition.
    """
    u = comp.factor_map
    u_inv = np.linalg.inv(u)
    q = comp.space.basis
    images = []
    for k in kraus_ops:
        r, _ = _rep_image_from_factor(
            u, u_inv, q.conj().T @ np.asarray(k, dtype=complex) @ q, comp.mult_dim, comp.irrep_dim
        )
        images.append(r)
    n = comp.irrep_dim
    level = list(images)
    collected = list(images)
    levels = 1

    def span_dim(mats):
        rows = np.stack(mats).reshape(len(mats), -1)
        return orthonormal_columns(rows.T, tol).shape[1]

    while span_dim(collected) < n * n and levels < 4:
        level = [a @ b for a in images for b in level]
        collected.extend(level)
        levels += 1
    if span_dim(collected) < n * n:
        raise NotUniqueFixedPoint(
            "represented operation elements do not span the irreducible block"
        )
    scale = 1.0 / np.sqrt(levels)
    return [scale * m for m in collected]


def _inv_sqrt(pos, tol):
    vals, vecs = np.linalg.eigh((pos + pos.conj().T) / 2.0)
    if vals.min() <= tol.eps_residual * max(1.0, vals.max()):
        raise NoPositiveFixedPoint("matrix is not strictly positive")
    return (vecs * (vals ** -0.5)) @ vecs.conj().T


def unitarize(comp, kraus_ops, tol=DEFAULT_TOL):
    """Make the factorization unitary via the channel fixed point.

    Given operation elements whose algebra restricts irreducibly, the Gram
    matrix U^dag U factors as rho' (x) rho with rho the unique fixed point
    of X -> sum R(K)^dag X R(K); multiplying U by the inverse square roots
    yields a unitary factorization.
    """
    if comp.factor_map is None:
        raise ValueError("component factorization must be filled first")
    images = _spanning_rep_images(comp, kraus_ops, tol)
    rho = channel_fixed_point(images, tol)
    u = comp.factor_map
    gram = u.conj().T @ u
    m, n = comp.mult_dim, comp.irrep_dim
    blocks = gram.reshape(m, n, m, n)
    rho_prime = np.einsum("aibj,ij->ab", blocks, rho.conj()) / np.trace(rho @ rho).real
    defect = float(np.linalg.norm(gram - np.kron(rho_prime, rho)))
    if defect > 1e3 * tol.eps_residual * max(1.0, float(np.linalg.norm(gram))):
        raise NotKroneckerFactorable(
            "U^dag U does not factor as rho' (x) rho (defect %g)" % defect
        )
    w = _inv_sqrt(rho_prime, tol)
    v = _inv_sqrt(rho, tol)
    u_new = u @ np.kron(w, v)
    unitary = (
        float(np.linalg.norm(u_new.conj().T @ u_new - np.eye(u_new.shape[0])))
        <= 1e2 * tol.eps_residual
    )
    pair = FixedPointPair(rho=rho, rho_prime=rho_prime, w=w, v=v)
    return pair, replace(comp, factor_map=u_new, unitary=unitary)


def make_cptp(errs, lam):
    """Rescale an error set and append the completion operation element.

    Returns {sqrt(lam) E_i} plus (I - lam sum E_i^dag E_i)^(1/2); raises
    LambdaTooLarge when the completion operator is not PSD.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    d = errs.dim
    total = sum(e.conj().T @ e for e in errs.operators)
    completion = np.eye(d, dtype=complex) - lam * total
    completion = (completion + completion.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(completion)
    if vals.min() < -1e-12 * max(1.0, abs(vals.max())):
        raise LambdaTooLarge("completion operator has eigenvalue %g" % vals.min())
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
    mats = [np.sqrt(lam) * e for e in errs.operators] + [root]
    names = tuple(errs.names) + ("completion",)
    return OperatorSet(dim=d, names=names, operators=tuple(mats))


def _encoding_from_component(comp):
    embed = comp.space.basis @ comp.factor_map
    return SubsystemEncoding(
        n_logical=comp.mult_dim,
        s_dim=comp.irrep_dim,
        embed=embed,
        provenance=comp.provenance,
        component_index=comp.index,
    )


def verify_noiseless(enc, errs, tol=DEFAULT_TOL):
    """Residual of the noiseless-subsystem conditions for an encoding.

    For each error E the compression M = embed^dag E embed is fitted to
    I (x) S(E) (partial-trace fit) and the leakage (I - P) E P out of the
    encoded subspace is measured; the residual is the worst defect.
    """
    n, s = enc.n_logical, enc.s_dim
    proj = enc.projector()
    comp_proj = np.eye(enc.dim) - proj
    worst = 0.0
    for e in errs.operators:
        m = enc.embed.conj().T @ e @ enc.embed
        blocks = m.reshape(n, s, n, s)
        fitted = np.einsum("aiaj->ij", blocks) / n
        defect = float(np.linalg.norm(m - np.kron(np.eye(n), fitted)))
        leak = float(np.linalg.norm(comp_proj @ e @ proj))
        worst = max(worst, defect, leak)
    return worst


def _dagger_closure_candidates(alg, comp, seed, tol):
    """Canonical decomposition of the dagger-closure of a restriction.

    Noiseless subsystems of the closure remain candidates for the original
    errors; the caller must verify them before emitting.
    """
    q = comp.space.basis
    cmats = _restricted_basis(alg.basis, q, tol)
    seed_ops = OperatorSet.from_matrices(list(cmats) + [c.conj().T for c in cmats])
    closed = generate_algebra(seed_ops, tol)
    subs = isotypic_components(closed, Subspace.full(q.shape[1]), seed=seed, tol=tol)
    encodings = []
    for j, sub in enumerate(subs):
        sub = factorize_component(closed, sub, seed=[seed, j, 0x5C], tol=tol)
        embed = q @ sub.space.basis @ sub.factor_map
        encodings.append(
            SubsystemEncoding(
                n_logical=sub.mult_dim,
                s_dim=sub.irrep_dim,
                embed=embed,
                provenance="via-dagger-closure",
                component_index=comp.index,
            )
        )
    return encodings


def find_noiseless(errs, seed=0, tol=DEFAULT_TOL, cptp_lambda=None):
    """Run the full noiseless-subsystem search.

    Returns (SubsystemDecomposition, ranked list of SubsystemEncoding).
    Encodings are ranked by descending logical dimension, ties broken by
    smaller cosubsystem and component index.  The null space Z is reported
    as a trivial noiseless subspace: error operators have probability zero
    on its states, so its protection is vacuous.
    """
    work = make_cptp(errs, cptp_lambda) if cptp_lambda is not None else errs
    alg, structure = algebra_structure(work, tol)
    d = work.dim
    total = sum(e.conj().T @ e for e in work.operators)
    is_cptp = float(np.linalg.norm(total - np.eye(d))) <= 1e3 * tol.eps_residual * max(
        1.0, float(np.linalg.norm(total))
    )
    comps = isotypic_components(alg, structure.semisimple_span, seed=seed, tol=tol)
    encodings = []
    filled = []
    for k, comp in enumerate(comps):
        comp = factorize_component(alg, comp, seed=[seed, k, 0xFA], tol=tol)
        if comp.unitary:
            encodings.append(_encoding_from_component(comp))
        elif is_cptp:
            _, comp = unitarize(comp, list(work.operators), tol)
            comp = replace(comp, provenance="cptp")
            encodings.append(_encoding_from_component(comp))
        else:
            for cand in _dagger_closure_candidates(alg, comp, seed=[seed, k, 0xDC], tol=tol):
                if verify_noiseless(cand, work, tol) <= tol.eps_residual:
                    encodings.append(cand)
        filled.append(replace(comp, index=k))
    # defensive gate: everything emitted must verify against the work set
    encodings = [e for e in encodings if verify_noiseless(e, work, tol) <= 10 * tol.eps_residual]
    z = structure.zero_space
    if z.dim > 0:
        encodings.append(
            SubsystemEncoding(
                n_logical=z.dim,
                s_dim=1,
                embed=z.basis,
                trivial=True,
                provenance="zero-probability subspace",
            )
        )
    spanned = [c.space.basis for c in filled] + ([z.basis] if z.dim else [])
    if spanned:
        covered = orthonormal_columns(np.concatenate(spanned, axis=1), tol)
        _, remainder = rank_and_nullspace(covered.conj().T, tol)
    else:
        remainder = Subspace.full(d)
    encodings.sort(key=lambda e: (-e.n_logical, e.s_dim, e.component_index))
    deco = SubsystemDecomposition(
        components=tuple(filled), zero_space=z, remainder=remainder
    )
    return deco, encodings
