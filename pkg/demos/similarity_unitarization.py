"""Turning a similarity factorization into a unitary one.

When errors are conjugated by an invertible (not unitary) map T, the
isotypic factorization U it induces is invertible but not unitary.  If
the errors are operation elements of a trace-preserving operation, the
Gram matrix U^dag U factors as rho' (x) rho, where rho is the unique
fixed point of the represented channel -- and multiplying U by the
inverse square roots of the factors makes it unitary.
"""

from dataclasses import replace

import numpy as np

from subsys import (
    algebra_structure,
    factorize_component,
    isotypic_components,
    unitarize,
)
from subsys.generators import planted_similarity

mult, irrep = 2, 3
errs, cptp, t = planted_similarity(seed=1, mult=mult, irrep=irrep)
print("errors T (I (x) B_i) T^(-1) on dim %d, cond(T) = %.2f" % (errs.dim, np.linalg.cond(t)))

alg, structure = algebra_structure(errs)
comps = isotypic_components(alg, structure.semisimple_span, seed=1)
comp = factorize_component(alg, comps[0], seed=1, force_general=True)

# skew the factor map so it is visibly non-unitary
rng = np.random.default_rng(1)
c = np.eye(mult) + 0.4 * rng.standard_normal((mult, mult))
s = np.eye(irrep) + 0.4 * rng.standard_normal((irrep, irrep))
comp = replace(comp, factor_map=comp.factor_map @ np.kron(c, s), unitary=False)

u = comp.factor_map
print("before: |U^dag U - I| = %.3f" % np.linalg.norm(u.conj().T @ u - np.eye(mult * irrep)))

pair, fixed = unitarize(comp, list(cptp.operators))
u = fixed.factor_map
print("after:  |U^dag U - I| = %.2e" % np.linalg.norm(u.conj().T @ u - np.eye(mult * irrep)))
print("channel fixed point spectrum:", np.round(np.linalg.eigvalsh(pair.rho), 4))
