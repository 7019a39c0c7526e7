"""Random state generators shared by the test modules."""
import numpy as np

from sea_entanglement.fock import BOSON, FERMION, FockVector, ModeSpace, SingleParticleState, occupation_keys
from sea_entanglement.locality import local_product, sector_key
from sea_entanglement.partition import Partition

XY = Partition.of({"X": [0], "Y": [1]})


def cplx(rng, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_sp(space: ModeSpace, rng) -> SingleParticleState:
    return SingleParticleState(space, cplx(rng, space.dim))


def random_vector(space, statistics, keys, rng) -> FockVector:
    keys = list(keys)
    v = FockVector(statistics, space, dict(zip(keys, cplx(rng, len(keys)))))
    return v.normalized()


def random_local(space, statistics, partition, name, rng, numbers=None, sector=None, max_particles=3):
    """Random vector on the keys of subsystem ``name`` with the given local numbers or sector."""
    keys = partition.local_basis(space, name, statistics, max_particles)
    if numbers is not None:
        keys = [k for k in keys if len(k) in numbers]
    if sector is not None:
        keys = [k for k in keys if sector_key(len(k), statistics) == sector]
    return random_vector(space, statistics, keys, rng)


def random_global(space, statistics, n, rng) -> FockVector:
    return random_vector(space, statistics, occupation_keys(space.labels, n, statistics), rng)


def random_fermion_parity(space, parity, rng) -> FockVector:
    """Generic (entangled) fermion state with definite total parity."""
    keys = [
        k
        for n in range(space.dim + 1)
        if n % 2 == parity
        for k in occupation_keys(space.labels, n, FERMION)
    ]
    return random_vector(space, FERMION, keys, rng)


def random_fermion_separable(space, parity, rng, partition=XY) -> FockVector:
    """alpha A (x) B + beta C (x) D with local parities fixed by the total parity."""
    first, second = partition.names
    if parity == 0:
        pairs = [("odd", "odd"), ("even", "even")]
    else:
        pairs = [("odd", "even"), ("even", "odd")]
    a, b = cplx(rng, 2)
    total = FockVector.zero(FERMION, space)
    for coeff, (sa, sb) in zip((a, b), pairs):
        x = random_local(space, FERMION, partition, first, rng, sector=sa, max_particles=space.n_internal)
        y = random_local(space, FERMION, partition, second, rng, sector=sb, max_particles=space.n_internal)
        total = total + coeff * local_product(x, y, partition)
    return total.normalized()


def random_boson_separable(space, n, rng, partition=XY, superpose=True) -> FockVector:
    """sum_k c_k Psi^X_k (x) Psi^Y_{n-k}; a single k when ``superpose`` is false."""
    first, second = partition.names
    ks = range(n + 1) if superpose else [int(rng.integers(0, n + 1))]
    total = FockVector.zero(BOSON, space)
    for k in ks:
        x = random_local(space, BOSON, partition, first, rng, numbers=[k], max_particles=n)
        y = random_local(space, BOSON, partition, second, rng, numbers=[n - k], max_particles=n)
        total = total + cplx(rng) * local_product(x, y, partition)
    return total.normalized()


def random_unitary(n, rng) -> np.ndarray:
    q, r = np.linalg.qr(cplx(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))
