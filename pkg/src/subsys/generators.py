"""Example and planted-instance generators.

Covers the standard examples (collective decoherence, the three-qubit
repetition code, a bit-flip sample on the nine-qubit code) and seeded
planted instances with recorded ground truth, used to exercise the
noiseless-subsystem and protectability pipelines.
"""

from __future__ import annotations

import numpy as np

from .algebra import OperatorSet
from .linalg import orthonormal_columns, DEFAULT_TOL
from .noiseless import SubsystemEncoding

__all__ = [
    "collective",
    "repetition3",
    "shor9_bitflip_sample",
    "planted_noiseless",
    "planted_similarity",
    "planted_protectable",
    "planted_infeasible",
]

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _single_site(op, site, n):
    mats = [np.eye(2, dtype=complex)] * n
    mats[site] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def collective(n_qubits):
    """Collective-decoherence generators on n qubits: S_x, S_y, S_z, I."""
    d = 2**n_qubits
    mats, names = [], []
    for axis in "xyz":
        total = sum(_single_site(_PAULI[axis], k, n_qubits) for k in range(n_qubits))
        mats.append(total / 2.0)
        names.append("S%s" % axis)
    mats.append(np.eye(d, dtype=complex))
    names.append("I")
    return OperatorSet(dim=d, names=tuple(names), operators=tuple(mats))


def repetition3():
    """Bit-flip errors on three qubits plus the logical (x) syndrome encoding.

    The encoding columns are X_s |kkk> for logical k and syndrome label s
    over {none, flip 1, flip 2, flip 3}; the unique protecting code for
    this family is span{|000>, |111>}.
    """
    d = 8
    flips = [np.eye(d, dtype=complex)] + [
        _single_site(_PAULI["x"], k, 3) for k in range(3)
    ]
    errs = OperatorSet(dim=d, names=("I", "X1", "X2", "X3"), operators=tuple(flips))
    logical = [np.eye(d)[:, 0], np.eye(d)[:, 7]]  # |000>, |111>
    cols = []
    for vec in logical:
        for f in flips:
            cols.append(f @ vec)
    enc = SubsystemEncoding(n_logical=2, s_dim=4, embed=np.stack(cols, axis=1))
    return errs, enc


def shor9_bitflip_sample():
    """Single-bit-flip errors on nine qubits plus the nine-qubit code.

    The code states are ((|000> +- |111>)/sqrt(2))^(x3); the encoding has
    a trivial cosubsystem and is checked by the operator error-correction
    criterion.
    """
    d = 512
    errs = [np.eye(d, dtype=complex)] + [
        _single_site(_PAULI["x"], k, 9) for k in range(9)
    ]
    names = ("I",) + tuple("X%d" % (k + 1) for k in range(9))
    block = np.zeros((8, 2))
    block[0, 0] = block[7, 0] = 1 / np.sqrt(2)  # |000> + |111>
    block[0, 1] = 1 / np.sqrt(2)
    block[7, 1] = -1 / np.sqrt(2)  # |000> - |111>
    plus, minus = block[:, 0], block[:, 1]
    zero_l = np.kron(np.kron(plus, plus), plus)
    one_l = np.kron(np.kron(minus, minus), minus)
    embed = np.stack([zero_l, one_l], axis=1).astype(complex)
    enc = SubsystemEncoding(n_logical=2, s_dim=1, embed=embed)
    return OperatorSet(dim=d, names=names, operators=tuple(errs)), enc


def _random_unitary(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_positive(rng, d, spread=1.0):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return g @ g.conj().T / d + spread * np.eye(d)


def planted_noiseless(seed, mults, irreps, n_errors=3):
    """Errors W (sum_k I_mk (x) B_ki) W^dag with a known component profile.

    Returns (OperatorSet, ground truth) where the truth is the sorted
    multiset of (multiplicity, irreducible dimension) pairs.
    """
    mults = list(mults)
    irreps = list(irreps)
    rng = np.random.default_rng([seed, 0x9E])
    d = int(sum(m * n for m, n in zip(mults, irreps)))
    w = _random_unitary(rng, d)
    mats = []
    for _ in range(n_errors):
        blocks = []
        for m, n in zip(mults, irreps):
            b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            blocks.append(np.kron(np.eye(m), b))
        full = np.zeros((d, d), dtype=complex)
        off = 0
        for blk in blocks:
            size = blk.shape[0]
            full[off : off + size, off : off + size] = blk
            off += size
        mats.append(w @ full @ w.conj().T)
    truth = sorted(zip(mults, irreps))
    return OperatorSet.from_matrices(mats), truth


def planted_similarity(seed, mult, irrep, n_kraus=3):
    """Non-unitarily factorized errors T (I (x) B_i) T^(-1) on one component.

    T = W (P^(1/2) (x) Q^(1/2)) with W unitary and P, Q positive definite,
    and the B_i are operation elements (sum B_i^dag B_i = I).  Returns the
    error set, the CPTP set {W (I (x) B_i) W^dag} spanning the same
    algebra, and T.
    """
    rng = np.random.default_rng([seed, 0x51])
    d = mult * irrep
    w = _random_unitary(rng, d)
    p = _random_positive(rng, mult)
    q = _random_positive(rng, irrep)

    def _sqrt(m):
        vals, vecs = np.linalg.eigh(m)
        return (vecs * np.sqrt(vals)) @ vecs.conj().T

    t = w @ np.kron(_sqrt(p), _sqrt(q))
    t_inv = np.linalg.inv(t)
    g = rng.standard_normal((n_kraus * irrep, irrep)) + 1j * rng.standard_normal(
        (n_kraus * irrep, irrep)
    )
    iso = orthonormal_columns(g, DEFAULT_TOL)[:, :irrep]
    kraus = [iso[i * irrep : (i + 1) * irrep, :] for i in range(n_kraus)]
    mats = [t @ np.kron(np.eye(mult), b) @ t_inv for b in kraus]
    cptp = [w @ np.kron(np.eye(mult), b) @ w.conj().T for b in kraus]
    return OperatorSet.from_matrices(mats), OperatorSet.from_matrices(cptp), t


def planted_protectable(seed, dim=6, n_logical=2, s_dim=2, n_errors=3):
    """Errors admitting a known protecting code for a random encoding.

    On the planted code the errors act as alpha_ij U0; off the code they
    are arbitrary.  Returns (errors, encoding, planted code columns).
    """
    rng = np.random.default_rng([seed, 0x9C])
    if dim < n_logical * s_dim:
        raise ValueError("dim too small for the encoding")
    frame = _random_unitary(rng, dim)
    embed = frame[:, : n_logical * s_dim]
    enc = SubsystemEncoding(n_logical=n_logical, s_dim=s_dim, embed=embed)
    code = _random_unitary(rng, dim)[:, :n_logical]
    u0 = _random_unitary(rng, n_logical)
    p_code = code @ code.conj().T
    mats = []
    for _ in range(n_errors):
        alphas = rng.standard_normal(s_dim) + 1j * rng.standard_normal(s_dim)
        on_code = embed @ np.kron(u0, alphas.reshape(-1, 1)) @ code.conj().T
        off = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        mats.append(on_code + off @ (np.eye(dim) - p_code))
    return OperatorSet.from_matrices(mats), enc, code


def planted_infeasible(seed, kind="small-preimage"):
    """Instances with no protecting code, by exact construction.

    'small-preimage': enough generic invertible errors that the common
    preimage of the encoded subspace is smaller than the code dimension.
    'forced-zero': the compressed maps on V chain through rank-deficient
    blocks so that the code equations admit only the zero solution.
    Returns (errors, encoding).
    """
    rng = np.random.default_rng([seed, 0x1F])
    if kind == "small-preimage":
        dim, n_logical, s_dim = 6, 2, 1
        frame = _random_unitary(rng, dim)
        embed = frame[:, : n_logical * s_dim]
        enc = SubsystemEncoding(n_logical=n_logical, s_dim=s_dim, embed=embed)
        mats = [
            rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            for _ in range(2)
        ]
        return OperatorSet.from_matrices(mats), enc
    if kind != "forced-zero":
        raise ValueError("unknown kind %r" % kind)
    n_logical, s_dim = 2, 2
    dim = 6
    frame = _random_unitary(rng, dim)
    embed = frame[:, : n_logical * s_dim]
    enc = SubsystemEncoding(n_logical=n_logical, s_dim=s_dim, embed=embed)
    vb = frame[:, n_logical * s_dim - 2 :][:, :2]  # will be forced to be V
    # two maps of rank one whose row spaces jointly fill V
    f1 = np.zeros((n_logical, 2), dtype=complex)
    f2 = np.zeros((n_logical, 2), dtype=complex)
    f1[0, 0] = 1.0
    f2[1, 1] = 1.0
    blocks = [np.zeros((n_logical * s_dim, 2), dtype=complex) for _ in range(2)]
    blocks[0][0::s_dim, :] = f1  # syndrome component 0 of error 0
    blocks[1][1::s_dim, :] = f2  # syndrome component 1 of error 1
    p_v = vb @ vb.conj().T
    proj = embed @ embed.conj().T
    comp = np.eye(dim) - proj
    mats = []
    for blk in blocks:
        leak = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        mats.append(embed @ blk @ vb.conj().T + comp @ leak @ (np.eye(dim) - p_v))
    return OperatorSet.from_matrices(mats), enc
