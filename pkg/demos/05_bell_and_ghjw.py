# A Bell-like state over {vac, up-down} on each side.  We prepare it by
# postselection and violate CHSH, then connect two purifications of the same
# reduced state by a unitary on Y.
import math

import numpy as np

from sea_entanglement import (
    ChshSettings,
    bell_like_state,
    chsh_value,
    chsh_value_fock,
    classical_chsh_bound,
    factorize_bipartite,
    ghjw_connecting_unitary,
    prepare_bell_like_state,
    two_mode_state,
)
from sea_entanglement.bell import PARTITION

prep = prepare_bell_like_state()
print("postselection probability:", prep.probability)
print("overlap with the target:  ", abs(prep.state.inner(bell_like_state())))

settings = ChshSettings.optimal()
print("CHSH (qubit encoding):", chsh_value(prep.state, settings))
print("CHSH (ladder operators):", chsh_value_fock(prep.state, settings))
print("Tsirelson bound:", 2 * math.sqrt(2), " classical bound:", classical_chsh_bound())

# Two purifications of the same reduced state of X
h = 1 / math.sqrt(2)
psi = two_mode_state([h, h], [h, h], "fermion")
fs = factorize_bipartite(psi, PARTITION)
rng = np.random.default_rng(1)
u = np.eye(len(fs.second_basis), dtype=complex)
odd = [j for j, k in enumerate(fs.second_basis) if len(k) == 1]
q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
u[np.ix_(odd, odd)] = q
psi_prime = fs.with_coeffs(fs.coeffs @ u.T).to_fock()

found = ghjw_connecting_unitary(psi, psi_prime, PARTITION)
print("\nconnecting unitary on", found.labels())
print(np.round(found.unitary, 3))
print("residual:", found.residual)
