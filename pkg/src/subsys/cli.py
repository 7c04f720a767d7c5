"""Command-line interface: noiseless / protectable / qec-check / gen.

Exit codes form a stable machine contract: 0 success, 1 file or
dimension errors, 2 retries exhausted in the randomized decomposition,
3 NOT_PROTECTABLE, 4 UNDECIDED.  Reports carry the seed and tolerances
so any run can be replayed bit-for-bit; no timestamps are embedded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import (
    DimensionMismatch,
    OperatorFileError,
    RetriesExhausted,
    SubsysError,
)
from .generators import (
    collective,
    planted_infeasible,
    planted_noiseless,
    planted_protectable,
    repetition3,
    shor9_bitflip_sample,
)
from .linalg import DEFAULT_TOL, Tolerance
from .noiseless import SubsystemEncoding, find_noiseless, verify_noiseless
from .opio import (
    load_encoding_file,
    load_operator_file,
    matrix_to_json,
    save_encoding_file,
    save_operator_file,
)
from .protectable import (
    NOT_PROTECTABLE,
    PROTECTABLE,
    UNDECIDED,
    check_protectable,
    verify_error_correcting,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_RETRIES = 2
EXIT_NOT_PROTECTABLE = 3
EXIT_UNDECIDED = 4


def _default_seed():
    env = os.environ.get("SUBSYS_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise OperatorFileError("SUBSYS_SEED must be an integer, got %r" % env)


def _tolerance(args):
    eps = getattr(args, "tolerance", None)
    if eps is None:
        return DEFAULT_TOL
    return Tolerance(eps_residual=eps)


def _emit(report, output):
    if output == "json":
        print(json.dumps(report, sort_keys=True))
        return
    print("%s report (subsys %s)" % (report["command"], report["version"]))
    for key in sorted(report):
        if key in ("command", "version", "components", "encodings", "certificate", "residuals"):
            continue
        print("  %s: %s" % (key, report[key]))
    for comp in report.get("components", []):
        print(
            "  component %(index)d: mult %(mult_dim)d x irrep %(irrep_dim)d, unitary=%(unitary)s"
            % comp
        )
    for enc in report.get("encodings", []):
        print(
            "  encoding: N=%(N)d s=%(s_dim)d trivial=%(trivial)s residual=%(residual).3e"
            % enc
        )
    if "residuals" in report:
        print("  residual matrix:")
        for row in report["residuals"]:
            print("    " + " ".join("%.3e" % r for r in row))


def cmd_noiseless(args):
    ops = load_operator_file(args.ops)
    tol = _tolerance(args)
    deco, encodings = find_noiseless(ops, seed=args.seed, tol=tol)
    report = {
        "command": "noiseless",
        "version": __version__,
        "seed": args.seed,
        "eps_residual": tol.eps_residual,
        "eps_rank": tol.eps_rank,
        "dim": ops.dim,
        "zero_space_dim": deco.zero_space.dim,
        "remainder_dim": deco.remainder.dim,
        "components": [
            {
                "index": c.index,
                "mult_dim": c.mult_dim,
                "irrep_dim": c.irrep_dim,
                "unitary": bool(c.unitary),
                "provenance": c.provenance,
            }
            for c in deco.components
        ],
        "encodings": [
            {
                "N": e.n_logical,
                "s_dim": e.s_dim,
                "trivial": bool(e.trivial),
                "provenance": e.provenance,
                "residual": float(verify_noiseless(e, ops, tol)) if not e.trivial else 0.0,
                "embed": matrix_to_json(e.embed),
            }
            for e in encodings
        ],
    }
    _emit(report, args.output)
    return EXIT_OK


def cmd_protectable(args):
    ops = load_operator_file(args.ops)
    enc = load_encoding_file(args.encoding)
    if enc.dim != ops.dim:
        raise DimensionMismatch(
            "encoding dimension %d != operator dimension %d" % (enc.dim, ops.dim)
        )
    tol = _tolerance(args)
    verdict = check_protectable(
        enc, ops, seed=args.seed, budget=(args.budget, 2000), tol=tol
    )
    report = {
        "command": "protectable",
        "version": __version__,
        "seed": args.seed,
        "budget": args.budget,
        "eps_residual": tol.eps_residual,
        "verdict": verdict.status,
        "reason": verdict.reason,
    }
    if verdict.certificate is not None:
        cert = verdict.certificate
        report["certificate"] = {
            "code": matrix_to_json(cert.code.basis),
            "isometry": matrix_to_json(cert.isometry),
            "alphas": matrix_to_json(cert.alphas),
        }
    _emit(report, args.output)
    if verdict.status == NOT_PROTECTABLE:
        return EXIT_NOT_PROTECTABLE
    if verdict.status == UNDECIDED:
        return EXIT_UNDECIDED
    return EXIT_OK


def cmd_qec_check(args):
    ops = load_operator_file(args.ops)
    enc = load_encoding_file(args.encoding)
    if enc.dim != ops.dim:
        raise DimensionMismatch(
            "encoding dimension %d != operator dimension %d" % (enc.dim, ops.dim)
        )
    tol = _tolerance(args)
    n, s = enc.n_logical, enc.s_dim
    residuals = np.zeros((len(ops.operators), len(ops.operators)))
    for i, ei in enumerate(ops.operators):
        for j, ej in enumerate(ops.operators):
            m = enc.embed.conj().T @ ei.conj().T @ ej @ enc.embed
            blocks = m.reshape(n, s, n, s)
            g = np.einsum("aiaj->ij", blocks) / n
            residuals[i, j] = np.linalg.norm(m - np.kron(np.eye(n), g))
    ok, worst = verify_error_correcting(enc, ops, tol)
    report = {
        "command": "qec-check",
        "version": __version__,
        "eps_residual": tol.eps_residual,
        "pass": bool(ok),
        "worst_residual": float(worst),
        "residuals": residuals.tolist(),
    }
    _emit(report, args.output)
    return EXIT_OK


def cmd_gen(args):
    os.makedirs(args.output_dir, exist_ok=True)

    def path(name):
        return os.path.join(args.output_dir, name)

    if args.name == "collective":
        save_operator_file(path("ops.json"), collective(args.qubits))
    elif args.name == "repetition3":
        errs, enc = repetition3()
        save_operator_file(path("ops.json"), errs)
        save_encoding_file(path("encoding.json"), enc)
        code = np.zeros((8, 2), dtype=complex)
        code[0, 0] = 1.0
        code[7, 1] = 1.0
        save_encoding_file(
            path("code.json"),
            SubsystemEncoding(n_logical=2, s_dim=1, embed=code),
        )
    elif args.name == "shor9-bitflip-sample":
        errs, enc = shor9_bitflip_sample()
        save_operator_file(path("ops.json"), errs)
        save_encoding_file(path("encoding.json"), enc)
    elif args.name == "planted-noiseless":
        mults = [int(x) for x in args.mults.split(",")]
        irreps = [int(x) for x in args.irreps.split(",")]
        errs, truth = planted_noiseless(args.seed, mults, irreps)
        save_operator_file(path("ops.json"), errs)
        with open(path("truth.json"), "w") as fh:
            json.dump({"profile": [[m, n] for m, n in truth]}, fh)
            fh.write("\n")
    elif args.name == "planted-protectable":
        errs, enc, code = planted_protectable(args.seed)
        save_operator_file(path("ops.json"), errs)
        save_encoding_file(path("encoding.json"), enc)
        with open(path("truth.json"), "w") as fh:
            json.dump({"code": matrix_to_json(code)}, fh)
            fh.write("\n")
    elif args.name == "planted-infeasible":
        errs, enc = planted_infeasible(args.seed, kind=args.kind)
        save_operator_file(path("ops.json"), errs)
        save_encoding_file(path("encoding.json"), enc)
    else:
        raise OperatorFileError("unknown generator %r" % args.name)
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="subsys",
        description="Noiseless and protectable subsystem analysis for error operator sets.",
    )
    parser.add_argument("--version", action="version", version="subsys %s" % __version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("noiseless", help="decompose an error set into noiseless subsystems")
    p.add_argument("ops")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--output", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_noiseless)

    p = sub.add_parser("protectable", help="decide protectability of an encoding")
    p.add_argument("ops")
    p.add_argument("encoding")
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--output", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_protectable)

    p = sub.add_parser("qec-check", help="operator error-correction criterion")
    p.add_argument("ops")
    p.add_argument("encoding")
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--output", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_qec_check)

    p = sub.add_parser("gen", help="write example operator/encoding files")
    p.add_argument(
        "name",
        choices=(
            "collective",
            "repetition3",
            "shor9-bitflip-sample",
            "planted-noiseless",
            "planted-protectable",
            "planted-infeasible",
        ),
    )
    p.add_argument("--qubits", type=int, default=3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mults", default="2,1")
    p.add_argument("--irreps", default="2,3")
    p.add_argument("--kind", default="small-preimage", choices=("small-preimage", "forced-zero"))
    p.add_argument("-o", "--output-dir", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", None) is None and hasattr(args, "seed"):
            args.seed = _default_seed()
        return args.func(args)
    except (OperatorFileError, DimensionMismatch, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except RetriesExhausted as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_RETRIES
    except SubsysError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
