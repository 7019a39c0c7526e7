# Reduced states of two spin-half fermions shared between detectors X and Y.
# The partial trace keeps only blocks of definite local parity.
import numpy as np

from sea_entanglement import partial_trace, ssr_entropy, two_fermion_entropy_closed_form, two_mode_state
from sea_entanglement.entanglement import two_mode_partition

r, l = [0.8, 0.6], [0.6, 0.8]
psi = two_mode_state(r, l, "fermion")
xy = two_mode_partition(psi.space)
print("state:", psi)

dec = partial_trace(psi, xy, "X")
for sector in dec:
    print(f"\nsector {sector.key!r} of {dec.kept}, probability {sector.probability:.4f}")
    print("  basis:", sector.rho.labels())
    print(np.round(sector.rho.matrix.real, 4))

report = ssr_entropy(psi, xy)
print("\nentropy (bits):", report.total)
print("closed form:   ", two_fermion_entropy_closed_form(r[0], l[0], r[1], l[1]))
