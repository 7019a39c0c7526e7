"""Brute-force first-quantized ground truth.

States are dense rank-N tensors over the single-particle index, built by
literal sums over permutations.  Nothing here calls the occupation-basis
kernels, the operators or the partial traces it is used to check.

The embedding between the two pictures: for a canonical key ``B`` (sorted
index tuple) with multiplicities ``n_k``, the Fock amplitude equals
``sqrt(N! / prod n_k!) * T[B]`` for a normalized tensor ``T``.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SizeLimit, TypeMismatch
from .fock import (
    BOSON,
    FERMION,
    FockVector,
    ModeSpace,
    SingleParticleState,
    Statistics,
)
from .partition import Partition

MAX_PARTICLES = 6
MAX_DIM = 10


def _guard(n: int, d: int) -> None:
    if n > MAX_PARTICLES or d > MAX_DIM:
        raise SizeLimit(f"oracle limited to N <= {MAX_PARTICLES}, d <= {MAX_DIM}")


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def naive_permanent(matrix) -> complex:
    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    return complex(sum(math.prod(a[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n))))


def naive_determinant(matrix) -> complex:
    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    return complex(
        sum(
            permutation_sign(p) * math.prod(a[i, p[i]] for i in range(n))
            for p in itertools.permutations(range(n))
        )
    )


@dataclass(frozen=True, eq=False)
class DenseFirstQuantizedState:
    tensor: np.ndarray
    statistics: Statistics
    space: ModeSpace = field(repr=False)

    @property
    def n_particles(self) -> int:
        return self.tensor.ndim

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensor))

    def inner(self, other: "DenseFirstQuantizedState") -> complex:
        if other.statistics is not self.statistics or other.space != self.space:
            raise TypeMismatch("dense states differ in statistics or mode space")
        if other.n_particles != self.n_particles:
            return 0j
        return complex(np.vdot(self.tensor, other.tensor))


def _symmetrize(tensor: np.ndarray, statistics: Statistics) -> np.ndarray:
    """(1/N!) sum_sigma (+-1)^sigma P_sigma T."""
    n = tensor.ndim
    if n < 2:
        return tensor.copy()
    out = np.zeros_like(tensor)
    for perm in itertools.permutations(range(n)):
        sign = permutation_sign(perm) if statistics is FERMION else 1
        out += sign * np.transpose(tensor, perm)
    return out / math.factorial(n)


def oracle_product(states: Sequence[SingleParticleState], statistics) -> DenseFirstQuantizedState:
    """sum_sigma (+-1)^sigma psi_sigma(1) (x) ... (x) psi_sigma(N), normalized.

    A vanishing exterior product returns the zero tensor.
    """
    statistics = Statistics.parse(statistics)
    space = states[0].space
    n, d = len(states), space.dim
    _guard(n, d)
    total = np.zeros((d,) * n, dtype=complex)
    for perm in itertools.permutations(range(n)):
        sign = permutation_sign(perm) if statistics is FERMION else 1
        term = np.array(1.0 + 0j)
        for i in perm:
            term = np.multiply.outer(term, states[i].amplitudes)
        total += sign * term
    norm = np.linalg.norm(total)
    if norm > 1e-12:
        total = total / norm
    else:
        total = np.zeros_like(total)
    return DenseFirstQuantizedState(total, statistics, space)


def _embedding_factor(idx: Sequence[int]) -> float:
    n = len(idx)
    return math.sqrt(math.factorial(n) / math.prod(math.factorial(c) for c in Counter(idx).values()))


def to_fock(dense: DenseFirstQuantizedState) -> FockVector:
    space, n = dense.space, dense.n_particles
    combos = (
        itertools.combinations(range(space.dim), n)
        if dense.statistics is FERMION
        else itertools.combinations_with_replacement(range(space.dim), n)
    )
    terms = {}
    for idx in combos:
        amp = dense.tensor[idx] if n else dense.tensor[()]
        if abs(amp) > 0:
            key = tuple(space.label(i) for i in idx)
            terms[key] = _embedding_factor(idx) * amp
    return FockVector(dense.statistics, space, terms)


def from_fock(v: FockVector) -> DenseFirstQuantizedState:
    """Inverse of :func:`to_fock` for a vector with one particle number."""
    numbers = v.particle_numbers()
    if len(numbers) > 1:
        raise ValueError("dense first-quantized states have a fixed particle number")
    n = numbers[0] if numbers else 0
    d = v.space.dim
    _guard(n, d)
    tensor = np.zeros((d,) * n, dtype=complex)
    for key, amp in v.items():
        idx = [v.space.index(lab) for lab in key]
        base = amp / _embedding_factor(idx)
        for perm in set(itertools.permutations(range(n))):
            arranged = tuple(idx[p] for p in perm)
            sign = permutation_sign(perm) if v.statistics is FERMION else 1
            tensor[arranged] = sign * base
    return DenseFirstQuantizedState(tensor, v.statistics, v.space)


def from_fock_sectors(v: FockVector) -> dict[int, DenseFirstQuantizedState]:
    return {n: from_fock(v.sector(n)) for n in v.particle_numbers()}


def oracle_annihilate(dense: DenseFirstQuantizedState, psi: SingleParticleState) -> DenseFirstQuantizedState:
    """sqrt(N) sum_a conj(psi_a) T[a, ...]."""
    n = dense.n_particles
    if n == 0:
        return DenseFirstQuantizedState(np.zeros((), complex), dense.statistics, dense.space)
    out = math.sqrt(n) * np.tensordot(psi.amplitudes.conj(), dense.tensor, axes=(0, 0))
    return DenseFirstQuantizedState(np.asarray(out), dense.statistics, dense.space)


def oracle_create(dense: DenseFirstQuantizedState, psi: SingleParticleState) -> DenseFirstQuantizedState:
    """sqrt(N+1) S(psi (x) T) with S the (anti)symmetrizer."""
    n = dense.n_particles
    _guard(n + 1, dense.space.dim)
    raw = np.multiply.outer(psi.amplitudes, dense.tensor)
    out = math.sqrt(n + 1) * _symmetrize(raw, dense.statistics)
    return DenseFirstQuantizedState(out, dense.statistics, dense.space)


def oracle_transition_amplitude(bra, ket, statistics) -> complex:
    """Normalized overlap from literal permutation sums over the Gram matrices."""
    statistics = Statistics.parse(statistics)
    if len(bra) != len(ket):
        return 0j
    kernel = naive_permanent if statistics is BOSON else naive_determinant

    def g(a, b):
        return np.array([[np.vdot(x.amplitudes, y.amplitudes) for y in b] for x in a])

    nb = kernel(g(bra, bra)).real
    nk = kernel(g(ket, ket)).real
    return kernel(g(bra, ket)) / math.sqrt(nb * nk)


@dataclass(frozen=True, eq=False)
class OracleReduction:
    """Unnormalized reduced matrices of the kept subsystem, per sector."""

    kept: str
    blocks: dict
    bases: dict

    def weighted_spectrum(self) -> dict:
        return {k: np.clip(np.linalg.eigvalsh(m), 0.0, None) for k, m in self.blocks.items()}


def _local_sector(n: int, statistics: Statistics):
    if statistics is FERMION:
        return "even" if n % 2 == 0 else "odd"
    return n


def oracle_reduced_density(
    dense: DenseFirstQuantizedState, partition: Partition, kept: str
) -> OracleReduction:
    """Mode-level reduced matrices read directly off the dense tensor.

    For a split of the N particles into a set ``A`` of the other subsystem's
    indices and a set ``C`` of the kept subsystem's indices, the bipartite
    coefficient is ``sqrt(N!/(prod n_A! prod n_C!)) * T[A..., C...]``; the
    tensor's own (anti)symmetry supplies the ordering sign.
    """
    space, n, stats = dense.space, dense.n_particles, dense.statistics
    other = partition.other(kept)
    mine = [space.index(lab) for lab in space.labels if lab.spatial in partition.modes(kept)]
    theirs = [space.index(lab) for lab in space.labels if lab.spatial in partition.modes(other)]
    combos = itertools.combinations if stats is FERMION else itertools.combinations_with_replacement
    blocks: dict = {}
    bases: dict = {}
    for n_kept in range(n + 1):
        rows = list(combos(theirs, n - n_kept))
        cols = list(combos(mine, n_kept))
        if not rows or not cols:
            continue
        coeff = np.zeros((len(rows), len(cols)), dtype=complex)
        for i, a in enumerate(rows):
            for j, c in enumerate(cols):
                idx = a + c
                factor = math.sqrt(
                    math.factorial(n)
                    / math.prod(math.factorial(m) for m in Counter(a).values())
                    / math.prod(math.factorial(m) for m in Counter(c).values())
                )
                coeff[i, j] = factor * (dense.tensor[idx] if n else dense.tensor[()])
        rho = coeff.T @ coeff.conj()
        if np.trace(rho).real < 1e-15:
            continue
        sector = _local_sector(n_kept, stats)
        keys = [tuple(space.label(i) for i in c) for c in cols]
        if sector in blocks:
            blocks[sector] = _direct_sum(blocks[sector], rho)
            bases[sector] = bases[sector] + keys
        else:
            blocks[sector] = rho
            bases[sector] = keys
    return OracleReduction(kept, blocks, bases)


def _direct_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0],) * 2, dtype=complex)
    out[: a.shape[0], : a.shape[0]] = a
    out[a.shape[0] :, a.shape[0] :] = b
    return out


def random_single_particle(space: ModeSpace, rng: np.random.Generator, sparsity: float = 0.0) -> SingleParticleState:
    vec = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    if sparsity:
        mask = rng.random(space.dim) < sparsity
        if mask.all():
            mask[rng.integers(space.dim)] = False
        vec[mask] = 0
    return SingleParticleState(space, vec)


# Randomized equivalence between the occupation-basis pipeline and the oracle.

EQUIVALENCE_TOL = 1e-9


@dataclass
class EquivalenceFailure:
    seed: int
    check: str
    error: float


@dataclass
class EquivalenceReport:
    seed: int
    trials: int
    max_error: float = 0.0
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first_failing_seed(self) -> int | None:
        return self.failures[0].seed if self.failures else None

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "checks": self.checks,
            "max_error": self.max_error,
            "ok": self.ok,
            "first_failing_seed": self.first_failing_seed,
            "failures": [vars(f) for f in self.failures[:20]],
        }


def _spectrum_error(a: dict, b: dict) -> float:
    err = 0.0
    for key in set(a) | set(b):
        x = np.sort(a.get(key, np.zeros(0)))[::-1]
        y = np.sort(b.get(key, np.zeros(0)))[::-1]
        n = max(len(x), len(y))
        x = np.pad(x, (0, n - len(x)))
        y = np.pad(y, (0, n - len(y)))
        err = max(err, float(np.max(np.abs(x - y), initial=0.0)))
    return err


def equivalence_instance(instance_seed: int) -> dict[str, float]:
    """Run every pipeline/oracle comparison on one random instance.

    Returns the absolute error of each check.  Instances have N <= 4 particles
    over two spatial modes with up to four internal levels (d <= 8).
    """
    # Imported here so the oracle's own constructions stay free of pipeline code.
    from .fock import product_state, transition_amplitude, permanent, determinant
    from .locality import partial_trace
    from .operators import annihilate, create

    rng = np.random.default_rng(instance_seed)
    statistics = BOSON if rng.random() < 0.5 else FERMION
    n_internal = int(rng.integers(1, 5))
    space = ModeSpace(2, n_internal)
    d = space.dim
    n_max = min(4, d) if statistics is FERMION else 4
    n = int(rng.integers(1, n_max + 1))
    sparsity = float(rng.choice([0.0, 0.3]))

    def draw(count):
        return [random_single_particle(space, rng, sparsity) for _ in range(count)]

    errors: dict[str, float] = {}
    ket_states, bra_states = draw(n), draw(n)
    dense_ket = oracle_product(ket_states, statistics)
    dense_bra = oracle_product(bra_states, statistics)
    if dense_ket.norm() < 0.5 or dense_bra.norm() < 0.5:
        return errors  # a vanishing wedge has no normalized product to compare
    fock_ket = product_state(ket_states, statistics)
    fock_bra = product_state(bra_states, statistics)

    errors["product"] = (fock_ket - to_fock(dense_ket)).norm()
    errors["round_trip"] = float(np.linalg.norm(from_fock(fock_ket).tensor - dense_ket.tensor))
    errors["inner"] = abs(fock_bra.inner(fock_ket) - dense_bra.inner(dense_ket))

    amp = transition_amplitude(bra_states, ket_states, statistics)
    errors["transition_vs_permutation_sum"] = abs(amp - oracle_transition_amplitude(bra_states, ket_states, statistics))
    errors["transition_vs_dense"] = abs(amp - dense_bra.inner(dense_ket))

    g = np.array([[b.inner(k) for k in ket_states] for b in bra_states])
    kernel = permanent(g) if statistics is BOSON else determinant(g)
    naive = naive_permanent(g) if statistics is BOSON else naive_determinant(g)
    errors["kernel"] = abs(kernel - naive)

    partition = Partition.of({"X": [0], "Y": [1]})
    for traced, kept in (("X", "Y"), ("Y", "X")):
        pipeline = partial_trace(fock_ket, partition, traced).weighted_spectrum()
        oracle = oracle_reduced_density(dense_ket, partition, kept).weighted_spectrum()
        errors[f"spectrum_keep_{kept}"] = _spectrum_error(pipeline, oracle)

    phi = draw(1)[0]
    if n + 1 <= MAX_PARTICLES:
        errors["create"] = (create(phi, fock_ket) - to_fock(oracle_create(dense_ket, phi))).norm()
    errors["annihilate"] = (annihilate(phi, fock_ket) - to_fock(oracle_annihilate(dense_ket, phi))).norm()
    return errors


def run_equivalence_trials(seed: int, trials: int, tol: float = EQUIVALENCE_TOL) -> EquivalenceReport:
    """Instances use seeds ``seed, seed + 1, ...`` so a failure can be replayed alone."""
    report = EquivalenceReport(seed, trials)
    for i in range(trials):
        instance_seed = seed + i
        for check, err in equivalence_instance(instance_seed).items():
            report.checks += 1
            report.max_error = max(report.max_error, err)
            if not err <= tol:
                report.failures.append(EquivalenceFailure(instance_seed, check, err))
    return report
