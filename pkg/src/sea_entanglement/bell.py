"""CHSH tests on the fermionic qubit encoding {|vac>, |up,down>} per subsystem."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import EncodingViolation
from .fock import FERMION, FockVector, ModeLabel, ModeSpace, SingleParticleState, product_state
from .locality import factorize_bipartite, local_product, project_sector
from .operators import annihilate_mode, create_mode, number_operator
from .partition import Partition

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)

SPACE = ModeSpace(2, 2)
PARTITION = Partition.of({"X": [0], "Y": [1]})
UP, DOWN = 0, 1


@dataclass(frozen=True)
class BlochVector:
    n1: float
    n2: float
    n3: float

    def __post_init__(self):
        if abs(math.sqrt(self.n1**2 + self.n2**2 + self.n3**2) - 1.0) > 1e-12:
            raise ValueError("Bloch vector must have unit length")

    @classmethod
    def from_direction(cls, x: float, y: float, z: float) -> "BlochVector":
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0:
            raise ValueError("zero direction")
        return cls(x / norm, y / norm, z / norm)

    def as_array(self) -> np.ndarray:
        return np.array([self.n1, self.n2, self.n3])

    def pauli(self) -> np.ndarray:
        return self.n1 * SIGMA_1 + self.n2 * SIGMA_2 + self.n3 * SIGMA_3


@dataclass(frozen=True)
class ChshSettings:
    a1: BlochVector
    a2: BlochVector
    b1: BlochVector
    b2: BlochVector

    @classmethod
    def optimal(cls) -> "ChshSettings":
        """Coplanar settings with n.n' = m.n' = m.m' = -n.m' = 1/sqrt(2)."""
        return cls(
            BlochVector(1.0, 0.0, 0.0),
            BlochVector(0.0, 0.0, 1.0),
            BlochVector.from_direction(1.0, 0.0, 1.0),
            BlochVector.from_direction(-1.0, 0.0, 1.0),
        )

    @classmethod
    def random(cls, rng: np.random.Generator) -> "ChshSettings":
        vecs = rng.normal(size=(4, 3))
        return cls(*(BlochVector.from_direction(*v) for v in vecs))


@dataclass(frozen=True)
class QubitEncoding:
    """Local basis (|vac>, |up,down>) with its Pauli matrices."""

    basis: tuple
    sigma: tuple

    def local_keys(self, spatial: int) -> tuple:
        return ((), (ModeLabel(spatial, UP), ModeLabel(spatial, DOWN)))


def encode_qubit_basis() -> QubitEncoding:
    return QubitEncoding(("vac", "up,down"), (SIGMA_1, SIGMA_2, SIGMA_3))


def bell_like_state() -> FockVector:
    """(|vac>^X |up,down>^Y - |up,down>^X |vac>^Y) / sqrt(2)."""
    vac = FockVector.vacuum(FERMION, SPACE)
    pair_x = FockVector.basis_state(FERMION, SPACE, [(0, UP), (0, DOWN)])
    pair_y = FockVector.basis_state(FERMION, SPACE, [(1, UP), (1, DOWN)])
    return (local_product(vac, pair_y, PARTITION) - local_product(pair_x, vac, PARTITION)) / math.sqrt(2)


@dataclass(frozen=True)
class BellPreparation:
    state: FockVector
    probability: float
    odd_state: FockVector
    odd_probability: float
    source: FockVector


def prepare_bell_like_state() -> BellPreparation:
    """Wedge (X - Y)/sqrt2 (up) with (X + Y)/sqrt2 (down) and postselect even parity."""
    s = 1 / math.sqrt(2)
    psi1 = SingleParticleState.from_labels(SPACE, {(0, UP): s, (1, UP): -s})
    psi2 = SingleParticleState.from_labels(SPACE, {(0, DOWN): s, (1, DOWN): s})
    source = product_state([psi1, psi2], FERMION)
    even = project_sector(source, PARTITION, "X", "even")
    odd = project_sector(source, PARTITION, "X", "odd")
    p_even, p_odd = even.norm() ** 2, odd.norm() ** 2
    return BellPreparation(even.normalized(), p_even, odd.normalized(), p_odd, source)


def _encoded_amplitudes(state: FockVector, partition: Partition) -> np.ndarray:
    x, y = partition.bipartite()
    fs = factorize_bipartite(state, partition, max_particles=4)
    space = state.space
    if space.n_internal != 2:
        raise EncodingViolation("qubit encoding needs exactly two internal levels")
    enc = encode_qubit_basis()
    (sx,), (sy,) = partition.modes(x), partition.modes(y)
    rows = [fs.first_basis.index(k) for k in enc.local_keys(sx)]
    cols = [fs.second_basis.index(k) for k in enc.local_keys(sy)]
    block = fs.coeffs[np.ix_(rows, cols)]
    leakage = np.linalg.norm(fs.coeffs) ** 2 - np.linalg.norm(block) ** 2
    if leakage > 1e-10:
        raise EncodingViolation(f"state leaks {leakage:.3g} outside the qubit encoding")
    return block.reshape(-1)


def chsh_operator(settings: ChshSettings) -> np.ndarray:
    """a1 b1 + a2 b1 + a2 b2 - a1 b2 on the two-qubit encoding."""
    a1, a2 = settings.a1.pauli(), settings.a2.pauli()
    b1, b2 = settings.b1.pauli(), settings.b2.pauli()
    return np.kron(a1, b1) + np.kron(a2, b1) + np.kron(a2, b2) - np.kron(a1, b2)


def chsh_value(state: FockVector, settings: ChshSettings, partition: Partition = PARTITION) -> float:
    """<psi| CHSH |psi> using the factorized two-qubit representation."""
    psi = _encoded_amplitudes(state, partition)
    return float(np.real(np.vdot(psi, chsh_operator(settings) @ psi)))


def pauli_on_fock(v: FockVector, spatial: int, n: BlochVector) -> FockVector:
    """(sigma . n) on one subsystem built from creation/annihilation operators.

    On the encoding, |up,down><vac| = a^dag_up a^dag_down,
    |vac><up,down| = a_down a_up and sigma_3 = 1 - (local particle number).
    """
    up, down = ModeLabel(spatial, UP), ModeLabel(spatial, DOWN)
    raise_ = create_mode(up, create_mode(down, v))
    lower = annihilate_mode(down, annihilate_mode(up, v))
    s1 = raise_ + lower
    s2 = 1j * raise_ - 1j * lower
    s3 = v - number_operator(v, [up, down])
    return n.n1 * s1 + n.n2 * s2 + n.n3 * s3


def chsh_value_fock(state: FockVector, settings: ChshSettings, partition: Partition = PARTITION) -> float:
    """Same expectation as :func:`chsh_value`, evaluated directly on Fock vectors."""
    x, y = partition.bipartite()
    (sx,), (sy,) = partition.modes(x), partition.modes(y)

    def corr(a: BlochVector, b: BlochVector) -> complex:
        return state.inner(pauli_on_fock(pauli_on_fock(state, sy, b), sx, a))

    s = settings
    value = corr(s.a1, s.b1) + corr(s.a2, s.b1) + corr(s.a2, s.b2) - corr(s.a1, s.b2)
    return float(value.real)


def chsh_combination(a1: float, a2: float, b1: float, b2: float) -> float:
    return a1 * b1 + a2 * b1 + a2 * b2 - a1 * b2


def deterministic_strategies():
    """All 16 assignments of +-1 outcomes to (a1, a2, b1, b2)."""
    return list(itertools.product((-1, 1), repeat=4))


def classical_chsh_bound() -> float:
    """Largest |CHSH| over deterministic local strategies (convex hull extremes)."""
    return float(max(abs(chsh_combination(*s)) for s in deterministic_strategies()))
