"""JSON file formats for operator sets and subsystem encodings.

Complex entries are stored as explicit [re, im] pairs; floats serialize
through Python's repr (17 significant digits), so a save/load round trip
is lossless at double precision.  Entries that are exact integers are
written as ints to keep large files compact.
"""

from __future__ import annotations

import json

import numpy as np

from .algebra import OperatorSet
from .errors import OperatorFileError
from .noiseless import SubsystemEncoding

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "save_operator_file",
    "load_operator_file",
    "save_encoding_file",
    "load_encoding_file",
]


def _number(x):
    x = float(x)
    return int(x) if x == int(x) and abs(x) < 2**53 else x


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[_number(z.real), _number(z.imag)] for z in row] for row in m]


def matrix_from_json(data, context="matrix"):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise OperatorFileError("%s: entries must be [re, im] pairs (%s)" % (context, exc))
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise OperatorFileError("%s: expected a 2-d array of [re, im] pairs" % context)
    return arr[:, :, 0] + 1j * arr[:, :, 1]


def save_operator_file(path, ops):
    doc = {
        "dim": ops.dim,
        "operators": [
            {"name": name, "matrix": matrix_to_json(op)}
            for name, op in zip(ops.names, ops.operators)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_operator_file(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OperatorFileError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise OperatorFileError("%s is not valid JSON: %s" % (path, exc))
    if not isinstance(doc, dict) or "dim" not in doc or "operators" not in doc:
        raise OperatorFileError("%s: expected an object with 'dim' and 'operators'" % path)
    dim = doc["dim"]
    if not isinstance(dim, int) or dim <= 0:
        raise OperatorFileError("%s: 'dim' must be a positive integer" % path)
    names, mats = [], []
    for idx, entry in enumerate(doc["operators"]):
        if not isinstance(entry, dict) or "matrix" not in entry:
            raise OperatorFileError("%s: operator %d is missing a matrix" % (path, idx))
        name = entry.get("name", "E_%d" % idx)
        m = matrix_from_json(entry["matrix"], context="%s operator %r" % (path, name))
        if m.shape != (dim, dim):
            raise OperatorFileError(
                "%s: operator %r has shape %s, expected (%d, %d)"
                % (path, name, m.shape, dim, dim)
            )
        names.append(str(name))
        mats.append(m)
    if not mats:
        raise OperatorFileError("%s: no operators" % path)
    return OperatorSet(dim=dim, names=tuple(names), operators=tuple(mats))


def save_encoding_file(path, enc):
    doc = {
        "N": enc.n_logical,
        "s_dim": enc.s_dim,
        "embed": matrix_to_json(enc.embed),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_encoding_file(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OperatorFileError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise OperatorFileError("%s is not valid JSON: %s" % (path, exc))
    for key in ("N", "s_dim", "embed"):
        if not isinstance(doc, dict) or key not in doc:
            raise OperatorFileError("%s: missing field %r" % (path, key))
    n, s = doc["N"], doc["s_dim"]
    if not isinstance(n, int) or not isinstance(s, int) or n <= 0 or s <= 0:
        raise OperatorFileError("%s: 'N' and 's_dim' must be positive integers" % path)
    embed = matrix_from_json(doc["embed"], context="%s embed" % path)
    if embed.shape[1] != n * s:
        raise OperatorFileError(
            "%s: embed has %d columns, expected N*s_dim = %d" % (path, embed.shape[1], n * s)
        )
    return SubsystemEncoding(n_logical=n, s_dim=s, embed=embed)
