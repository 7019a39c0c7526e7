"""Superselection-respecting entropies, Schmidt forms and GHJW constructions.

All entropies are in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptySector,
    NotAnEnsembleOf,
    NotCoPurifications,
    NotNormalized,
    NumericalContractViolation,
)
from .fock import FERMION, FockVector, ModeSpace, SingleParticleState, product_state
from .locality import (
    DensityMatrix,
    FactorizedState,
    SectorKey,
    factorize_bipartite,
    local_product,
    partial_trace,
    sector_key,
)
from .operators import LocalState, local_inner_product
from .partition import Partition


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """-sum lambda log2 lambda over the eigenvalues of a trace-one matrix."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    tr = np.trace(m).real
    if abs(tr - 1.0) > 1e-8:
        raise NotNormalized(f"trace is {tr}, expected 1")
    lam = np.linalg.eigvalsh((m + m.conj().T) / 2)
    lam = lam[lam > 0]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


@dataclass(frozen=True)
class SectorEntropy:
    key: SectorKey
    probability: float
    entropy: float


@dataclass(frozen=True)
class EntropyReport:
    total: float
    per_sector: tuple[SectorEntropy, ...]
    kept: str


def ssr_entropy(state: FockVector, partition: Partition, traced: str | None = None) -> EntropyReport:
    """Probability-weighted entropy of the sector-resolved reduced state.

    ``traced`` defaults to the first subsystem of the partition.
    """
    traced = traced or partition.names[0]
    dec = partial_trace(state, partition, traced)
    per = tuple(
        SectorEntropy(s.key, s.probability, von_neumann_entropy(s.rho)) for s in dec
    )
    total = sum(s.probability * s.entropy for s in per)
    return EntropyReport(max(0.0, total), per, dec.kept)


def _group_entropy(*weights: float) -> float:
    total = sum(weights)
    if total <= 0:
        return 0.0
    return -sum(w * math.log2(w / total) for w in weights if w > 0)


def _normalized_pair(r: complex, l: complex) -> tuple[float, float]:
    norm = abs(r) ** 2 + abs(l) ** 2
    return abs(r) ** 2 / norm, abs(l) ** 2 / norm


def two_boson_entropy_closed_form(r1: complex, l1: complex, r2: complex, l2: complex) -> float:
    """Entropy of two bosons with distinct internal levels, one per detector sector."""
    r1s, l1s = _normalized_pair(r1, l1)
    r2s, l2s = _normalized_pair(r2, l2)
    return _group_entropy(r1s * l2s, l1s * r2s)


def two_fermion_entropy_closed_form(r1: complex, l1: complex, r2: complex, l2: complex) -> float:
    """Entropy of two fermions with distinct internal levels (even + odd sectors)."""
    r1s, l1s = _normalized_pair(r1, l1)
    r2s, l2s = _normalized_pair(r2, l2)
    return _group_entropy(r1s * r2s, l1s * l2s) + _group_entropy(r1s * l2s, l1s * r2s)


def two_mode_state(
    r: Sequence[complex],
    l: Sequence[complex],
    statistics,
    internal_levels: Sequence[int] | None = None,
    n_internal: int | None = None,
) -> FockVector:
    """Product of ``r_i|X, s_i> + l_i|Y, s_i>`` over two spatial modes X, Y."""
    if len(r) != len(l):
        raise ValueError("r and l must have equal length")
    levels = list(range(len(r))) if internal_levels is None else list(internal_levels)
    if len(levels) != len(r):
        raise ValueError("one internal level per particle")
    n_internal = n_internal or (max(levels) + 1)
    space = ModeSpace(2, n_internal)
    states = []
    for ri, li, s in zip(r, l, levels):
        states.append(SingleParticleState.from_labels(space, {(0, s): ri, (1, s): li}))
    return product_state(states, statistics)


def n_fermion_state(
    r: Sequence[complex],
    l: Sequence[complex],
    internal_levels: Sequence[int] | None = None,
    n_internal: int | None = None,
) -> FockVector:
    """Wedge product of ``r_i|X, s_i> + l_i|Y, s_i>``; levels default to 0..N-1."""
    return two_mode_state(r, l, FERMION, internal_levels, n_internal)


def two_mode_partition(space: ModeSpace) -> Partition:
    return Partition.of({space.spatial_names[0]: [0], space.spatial_names[1]: [1]})


def balanced_entropy(n: int, statistics=FERMION) -> float:
    amp = [1 / math.sqrt(2)] * n
    psi = two_mode_state(amp, amp, statistics)
    return ssr_entropy(psi, two_mode_partition(psi.space)).total


@dataclass(frozen=True)
class MaxEntropyScan:
    n: int
    balanced: float
    perturbed: tuple[tuple[int, float, float], ...]

    @property
    def is_local_max(self) -> bool:
        return all(e < self.balanced for _, _, e in self.perturbed)

    @property
    def max_perturbed(self) -> float:
        return max(e for _, _, e in self.perturbed)


def max_entropy_scan(n: int, step: float = 0.05, statistics=FERMION) -> MaxEntropyScan:
    """Entropy at the balanced point and at +-``step`` shifts of each |r_i|."""
    half = 1 / math.sqrt(2)
    balanced = balanced_entropy(n, statistics)
    perturbed = []
    for i in range(n):
        for delta in (step, -step):
            r = [half] * n
            r[i] = half + delta
            l = [math.sqrt(1 - x * x) for x in r]
            psi = two_mode_state(r, l, statistics)
            perturbed.append((i, delta, ssr_entropy(psi, two_mode_partition(psi.space)).total))
    return MaxEntropyScan(n, balanced, tuple(perturbed))


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """``psi = sum_a sqrt(w_a) |left_a> (x) |right_a>`` over local bases."""

    weights: np.ndarray
    left: np.ndarray
    right: np.ndarray
    first_basis: tuple
    second_basis: tuple
    sector: SectorKey | None = None

    @property
    def rank(self) -> int:
        return len(self.weights)

    def left_vector(self, a: int, statistics, space: ModeSpace) -> FockVector:
        return FockVector(statistics, space, dict(zip(self.first_basis, self.left[:, a])), validate=False)

    def right_vector(self, a: int, statistics, space: ModeSpace) -> FockVector:
        return FockVector(statistics, space, dict(zip(self.second_basis, self.right[:, a])), validate=False)


def schmidt_decompose(
    state: FockVector, partition: Partition, sector: SectorKey | None = None, tol: float = 1e-14
) -> SchmidtForm:
    """SVD of the factorized coefficients, optionally restricted to a sector.

    ``sector`` selects the second subsystem's superselection sector; the
    block is renormalized so the weights sum to one.
    """
    fs = factorize_bipartite(state, partition)
    coeffs = fs.coeffs
    cols = list(range(len(fs.second_basis)))
    if sector is not None:
        cols = [j for j, k in enumerate(fs.second_basis) if sector_key(len(k), fs.statistics) == sector]
        coeffs = coeffs[:, cols]
    norm = np.linalg.norm(coeffs)
    if norm < 1e-12:
        raise EmptySector(f"sector {sector!r} carries no weight")
    u, s, vh = np.linalg.svd(coeffs / norm, full_matrices=False)
    keep = s**2 > tol
    second = tuple(fs.second_basis[j] for j in cols)
    return SchmidtForm(s[keep] ** 2, u[:, keep], vh[keep].T, fs.first_basis, second, sector)


def _common_factorization(psi: FockVector, other: FockVector, partition: Partition):
    nmax = max(psi.particle_numbers() + other.particle_numbers() + [0])
    return factorize_bipartite(psi, partition, nmax), factorize_bipartite(other, partition, nmax)


@dataclass(frozen=True, eq=False)
class GhjwUnitary:
    """Unitary on the second subsystem with ``(I (x) U)|psi'> = |psi>``."""

    unitary: np.ndarray
    basis: tuple
    residual: float
    space: ModeSpace

    def labels(self) -> list[str]:
        return [self.space.format_key(k) for k in self.basis]

    def apply(self, fs: FactorizedState) -> FactorizedState:
        return fs.with_coeffs(fs.coeffs @ self.unitary.T)


def ghjw_connecting_unitary(
    psi: FockVector, psi_prime: FockVector, partition: Partition, tol: float = 1e-8
) -> GhjwUnitary:
    """Second-subsystem unitary mapping ``psi_prime`` onto ``psi``.

    Both states share the first subsystem's reduced matrix
    ``sum_s w_s |s><s|``, so with the common eigenbasis
    ``psi = sum_s sqrt(w_s)|s>|s^>`` and ``psi' = sum_s sqrt(w_s)|s>|s^'>``.
    The map ``sum_s |s^><s^'|`` is taken as the unitary polar factor of
    ``sum_s w_s |s^><s^'| = C^T conj(C')``; this agrees with it on the
    support, handles degenerate weights without choosing a basis inside each
    eigenspace, and completes it to a unitary on the complement.
    """
    fs, fsp = _common_factorization(psi, psi_prime, partition)
    c, cp = fs.coeffs, fsp.coeffs
    if np.linalg.norm(c @ c.conj().T - cp @ cp.conj().T) > tol:
        raise NotCoPurifications("reduced density matrices of the first subsystem differ")
    p, _, qh = np.linalg.svd(c.T @ cp.conj())
    u = p @ qh
    residual = float(np.linalg.norm(cp @ u.T - c))
    if residual > tol:
        raise NumericalContractViolation(f"connecting unitary residual {residual:.3g}")
    return GhjwUnitary(u, fs.second_basis, residual, psi.space)


@dataclass(frozen=True)
class GhjwEnsemble:
    vectors: tuple[FockVector, ...]
    residual: float


def ghjw_realize_ensemble(
    ensemble: Sequence[tuple[float, FockVector]],
    psi: FockVector,
    partition: Partition,
    tol: float = 1e-8,
) -> GhjwEnsemble:
    """Second-subsystem vectors completing ``psi = sum_a sqrt(w_a)|a> (x) |y_a>``.

    ``ensemble`` lists ``(w_a, |a>)`` with orthonormal first-subsystem states
    whose mixture equals the first subsystem's reduced matrix.  Each
    ``|y_a> = <a| o |psi> / sqrt(w_a)``.
    """
    first, _ = partition.bipartite()
    fs = factorize_bipartite(psi, partition)
    rho = fs.coeffs @ fs.coeffs.conj().T
    vecs = []
    for _, a in ensemble:
        partition.check_local(a, first)
        if any(k not in fs.first_basis for k in a.keys()):
            raise NotAnEnsembleOf("ensemble state outside the first subsystem's occupied basis")
        vecs.append(a.to_array(fs.first_basis))
    a_mat = np.array(vecs).T
    weights = np.array([w for w, _ in ensemble], dtype=float)
    if np.linalg.norm(a_mat.conj().T @ a_mat - np.eye(len(vecs))) > tol:
        raise NotAnEnsembleOf("ensemble states are not orthonormal")
    if np.linalg.norm((a_mat * weights) @ a_mat.conj().T - rho) > tol:
        raise NotAnEnsembleOf("ensemble does not reproduce the reduced density matrix")
    out = []
    rebuilt = FockVector.zero(psi.statistics, psi.space)
    for w, a in ensemble:
        if w <= 0:
            out.append(FockVector.zero(psi.statistics, psi.space))
            continue
        y = local_inner_product(LocalState(first, a), psi, partition) / math.sqrt(w)
        out.append(y)
        rebuilt = rebuilt + math.sqrt(w) * local_product(a, y, partition)
    residual = (rebuilt - psi).norm()
    if residual > tol:
        raise NumericalContractViolation(f"ensemble reconstruction residual {residual:.3g}")
    return GhjwEnsemble(tuple(out), residual)
