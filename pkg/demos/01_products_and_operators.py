# Symmetric and exterior products in the occupation basis, and the ladder
# operators that build them.
import math

import numpy as np

from sea_entanglement import BOSON, FERMION, FockVector, ModeSpace, SingleParticleState, create, product_state
from sea_entanglement.oracle import oracle_product, to_fock

space = ModeSpace(2, 1)          # two spatial modes X, Y, one internal level
h = 1 / math.sqrt(2)
plus = SingleParticleState(space, [h, h])
x = SingleParticleState.basis(space, 0)
y = SingleParticleState.basis(space, 1)

# Two bosons in the same superposition: amplitudes 1/2, 1/sqrt(2), 1/2
print("bosons  (X+Y)v(X+Y):", product_state([plus, plus], BOSON))

# Swapping the order of two fermions flips the sign
print("fermions X ^ Y:     ", product_state([x, y], FERMION))
print("fermions Y ^ X:     ", product_state([y, x], FERMION))

# Applying creation operators to the vacuum gives the unnormalized product
vac = FockVector.vacuum(FERMION, space)
print("a+(X) a+(Y)|vac>:   ", create(x, create(y, vac)))

# Cross-check against literal permutation sums in first quantization
rng = np.random.default_rng(0)
states = [SingleParticleState(ModeSpace(2, 2), rng.normal(size=4) + 1j * rng.normal(size=4)) for _ in range(3)]
for stats in (BOSON, FERMION):
    diff = (product_state(states, stats) - to_fock(oracle_product(states, stats))).norm()
    print(f"{stats.value:8s} occupation vs permutation-sum construction: {diff:.2e}")
