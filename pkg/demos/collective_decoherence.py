"""Noiseless subsystems under collective spin decoherence.

Three qubits coupled identically to a shared environment see only the
collective spin operators Sx, Sy, Sz.  The algebra those generate splits
the 8-dimensional space into a spin-3/2 part (multiplicity 1) and a
spin-1/2 part with multiplicity 2 -- and that two-dimensional
multiplicity space stores one logical qubit untouched by the noise.
"""

import numpy as np

from subsys import find_noiseless, verify_noiseless
from subsys.generators import collective

for n_qubits in (3, 4):
    errs = collective(n_qubits)
    deco, encodings = find_noiseless(errs, seed=0)
    print("collective decoherence on %d qubits (dim %d)" % (n_qubits, errs.dim))
    for comp in deco.components:
        print(
            "  component %d: multiplicity %d x irreducible dim %d"
            % (comp.index, comp.mult_dim, comp.irrep_dim)
        )
    for enc in encodings:
        if enc.trivial:
            continue
        residual = verify_noiseless(enc, errs)
        print(
            "  noiseless encoding: %d logical dim(s), cosubsystem dim %d, residual %.2e"
            % (enc.n_logical, enc.s_dim, residual)
        )
    best = max(e.n_logical for e in encodings if not e.trivial)
    print("  -> best protected logical dimension: %d" % best)
    print()
