"""Partial traces, superselection sectors, factorization and separability.

Two partial traces are provided.  :func:`partial_trace` contracts the traced
subsystem with the local inner product and keeps only superselection-sector
blocks of the kept subsystem (local parity for fermions, local particle
number for bosons).  :func:`partial_trace_nla` contracts with the interior
product against the full local identity; it exists to exhibit where that
definition breaks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateInput, NumericalContractViolation
from .fock import FERMION, FockVector, Key, ModeSpace, Statistics
from .operators import LocalState, interior_product, local_inner_product
from .partition import Partition, join_keys

SectorKey = Union[int, str]
MixedState = Sequence[tuple[float, FockVector]]

HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-9


def sector_key(n_particles: int, statistics: Statistics) -> SectorKey:
    """Superselection label of a local occupation key with ``n_particles``."""
    if statistics is FERMION:
        return "even" if n_particles % 2 == 0 else "odd"
    return n_particles


def _sector_order(key: SectorKey):
    return (0, key) if isinstance(key, int) else (1, 0 if key == "even" else 1)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian PSD matrix over a local occupation basis."""

    basis: tuple
    matrix: np.ndarray
    space: ModeSpace | None = None
    trace_value: float = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (len(self.basis), len(self.basis)):
            raise ValueError("matrix shape does not match basis length")
        if np.linalg.norm(m - m.conj().T) > HERMITIAN_TOL:
            raise NumericalContractViolation("density matrix is not Hermitian")
        m = (m + m.conj().T) / 2
        tr = float(np.trace(m).real)
        if len(self.basis) and np.linalg.eigvalsh(m).min() < -HERMITIAN_TOL:
            raise NumericalContractViolation("density matrix is not positive semidefinite")
        if not 0 < tr <= 1 + HERMITIAN_TOL:
            raise NumericalContractViolation(f"density matrix trace {tr} outside (0, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "trace_value", tr)

    def eigenvalues(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self.matrix), 0.0, None)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def labels(self) -> list[str]:
        if self.space is None:
            return [str(k) for k in self.basis]
        return [self.space.format_key(k) for k in self.basis]


@dataclass(frozen=True)
class Sector:
    key: SectorKey
    probability: float
    rho: DensityMatrix


@dataclass(frozen=True)
class SectorDecomposition:
    """Sector probabilities and normalized sector density matrices."""

    kept: str
    sectors: tuple[Sector, ...]

    def __iter__(self):
        return iter(self.sectors)

    def __len__(self):
        return len(self.sectors)

    def __getitem__(self, key: SectorKey) -> Sector:
        for s in self.sectors:
            if s.key == key:
                return s
        raise KeyError(key)

    def keys(self) -> list[SectorKey]:
        return [s.key for s in self.sectors]

    @property
    def probabilities(self) -> dict:
        return {s.key: s.probability for s in self.sectors}

    def weighted_spectrum(self) -> dict:
        """Sector -> probability-weighted eigenvalues (ascending)."""
        return {s.key: s.probability * s.rho.eigenvalues() for s in self.sectors}


def _as_ensemble(state: FockVector | MixedState) -> list[tuple[float, FockVector]]:
    if isinstance(state, FockVector):
        ensemble = [(1.0, state)]
    else:
        ensemble = [(float(p), v) for p, v in state]
    if not ensemble:
        raise DegenerateInput("empty ensemble")
    for p, v in ensemble:
        if p < 0:
            raise ValueError("ensemble weights must be nonnegative")
    if sum(p * v.norm() ** 2 for p, v in ensemble) < 1e-24:
        raise DegenerateInput("state has zero norm")
    return ensemble


def _hermitize(m: np.ndarray) -> np.ndarray:
    if np.linalg.norm(m - m.conj().T) > HERMITIAN_TOL:
        raise NumericalContractViolation("reduced matrix is not Hermitian before symmetrization")
    return (m + m.conj().T) / 2


def reduced_blocks(
    state: FockVector | MixedState, partition: Partition, traced: str
) -> tuple[str, dict[SectorKey, tuple[list[Key], np.ndarray]]]:
    """Unnormalized sector blocks of the kept subsystem.

    ``rho = sum_{q,k} p_k <Phi_q| o |Psi_k><Psi_k| o |Phi_q>`` with ``Phi_q``
    running over the traced subsystem's occupation keys, restricted to the
    superselection blocks of the kept subsystem.
    """
    ensemble = _as_ensemble(state)
    kept = partition.other(traced)
    statistics = ensemble[0][1].statistics
    space = ensemble[0][1].space
    partition.check_covers(space)
    columns: list[tuple[float, FockVector]] = []
    for p, psi in ensemble:
        traced_keys = sorted({partition.split(k, traced)[0] for k in psi.keys()})
        for q in traced_keys:
            phi = LocalState(traced, FockVector(statistics, space, {q: 1.0}, validate=False))
            columns.append((p, local_inner_product(phi, psi, partition)))
    kept_keys: dict[SectorKey, set] = {}
    for _, w in columns:
        for k in w.keys():
            kept_keys.setdefault(sector_key(len(k), statistics), set()).add(k)
    blocks = {}
    for sk in sorted(kept_keys, key=_sector_order):
        basis = sorted(kept_keys[sk], key=lambda k: (len(k), k))
        vecs = np.array([w.to_array(basis) for _, w in columns])
        weights = np.array([p for p, _ in columns])
        block = (vecs.T * weights) @ vecs.conj()
        blocks[sk] = (basis, _hermitize(block))
    return kept, blocks


def partial_trace(
    state: FockVector | MixedState, partition: Partition, traced: str
) -> SectorDecomposition:
    """Superselection-respecting partial trace over ``traced``.

    Returns the kept subsystem's sectors with their probabilities and
    trace-one density matrices.  ``state`` is a pure :class:`FockVector` or a
    list of ``(weight, FockVector)`` pairs.
    """
    kept, blocks = reduced_blocks(state, partition, traced)
    space = _as_ensemble(state)[0][1].space
    total = sum(float(np.trace(b).real) for _, b in blocks.values())
    sectors = []
    for sk, (basis, block) in blocks.items():
        weight = float(np.trace(block).real)
        if weight <= 1e-15 * total:
            continue
        sectors.append(Sector(sk, weight / total, DensityMatrix(basis, block / weight, space)))
    return SectorDecomposition(kept, tuple(sectors))


def project_sector(
    state: FockVector, partition: Partition, subsystem: str, key: SectorKey
) -> FockVector:
    """Keep only terms whose ``subsystem`` part lies in sector ``key``."""
    terms = {
        k: v
        for k, v in state.items()
        if sector_key(len(partition.split(k, subsystem)[0]), state.statistics) == key
    }
    return FockVector(state.statistics, state.space, terms, validate=False)


@dataclass(frozen=True, eq=False)
class FormalTraceResult:
    """Outcome of the interior-product trace, split into its two parts.

    ``scalar`` collects fully contracted terms (multiples of |vac><vac|);
    ``operator`` is the remaining matrix over nonvacuum keys in
    ``operator_basis``; ``coherence`` holds vacuum/nonvacuum cross terms.
    """

    scalar: complex
    operator_basis: tuple
    operator: np.ndarray
    coherence: np.ndarray
    space: ModeSpace | None = None

    @property
    def total_trace(self) -> float:
        return float((self.scalar + np.trace(self.operator)).real)

    def as_matrix(self) -> tuple[tuple, np.ndarray]:
        """Full matrix over ``(vac,) + operator_basis``."""
        n = len(self.operator_basis)
        m = np.zeros((n + 1, n + 1), dtype=complex)
        m[0, 0] = self.scalar
        m[0, 1:] = self.coherence
        m[1:, 0] = self.coherence.conj()
        m[1:, 1:] = self.operator
        return ((),) + tuple(self.operator_basis), m

    def purity(self) -> float:
        _, m = self.as_matrix()
        m = m / np.trace(m).real
        return float(np.real(np.trace(m @ m)))

    def operator_labels(self) -> list[str]:
        if self.space is None:
            return [str(k) for k in self.operator_basis]
        return [self.space.format_key(k) for k in self.operator_basis]


def partial_trace_nla(
    state: FockVector | MixedState,
    partition: Partition,
    traced: str,
    particle_number: int | None = None,
    include_vacuum: bool = False,
) -> FormalTraceResult:
    """Interior-product partial trace against the traced subsystem's identity.

    By default the identity runs over every nonvacuum local key of the traced
    subsystem (all particle numbers).  ``particle_number`` restricts it to a
    single local number, the regime where it agrees with
    :func:`partial_trace`.  ``include_vacuum`` adds the |vac><vac| term of the
    identity, which contracts nothing.
    """
    ensemble = _as_ensemble(state)
    statistics = ensemble[0][1].statistics
    space = ensemble[0][1].space
    partition.bipartite()
    nmax = max(max(v.particle_numbers(), default=0) for _, v in ensemble)
    if particle_number is not None:
        numbers = [particle_number]
    else:
        numbers = list(range(0 if include_vacuum else 1, nmax + 1))
    identity = [
        q
        for q in partition.local_basis(space, traced, statistics, nmax)
        if len(q) in numbers
    ]
    columns = []
    for p, psi in ensemble:
        for q in identity:
            bra = FockVector(statistics, space, {q: 1.0}, validate=False)
            w = interior_product(bra, psi)
            if len(w):
                columns.append((p, w))
    keys = sorted({k for _, w in columns for k in w.keys()}, key=lambda k: (len(k), k))
    if not columns:
        return FormalTraceResult(0j, (), np.zeros((0, 0), complex), np.zeros(0, complex), space)
    vecs = np.array([w.to_array(keys) for _, w in columns])
    weights = np.array([p for p, _ in columns])
    full = (vecs.T * weights) @ vecs.conj()
    if keys and keys[0] == ():
        scalar = full[0, 0]
        return FormalTraceResult(
            complex(scalar), tuple(keys[1:]), full[1:, 1:], full[0, 1:], space
        )
    return FormalTraceResult(0j, tuple(keys), full, np.zeros(len(keys), complex), space)


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    value: float
    detail: dict


def _local_owner(state: FockVector, partition: Partition) -> str | None:
    for name in partition.names:
        if partition.is_local(state, name):
            return name
    return None


def check_c1(state: FockVector, partition: Partition, method: str = "ssr") -> ValidityReport:
    """Trace of a state local to one subsystem must equal one.

    The state is traced over the subsystem that holds it; ``method`` selects
    the local-inner-product trace (``"ssr"``) or the interior-product one
    (``"nla"``).
    """
    owner = _local_owner(state, partition)
    if owner is None:
        raise ValueError("condition C1 applies to states local to a single subsystem")
    psi = state.normalized()
    if method == "ssr":
        _, blocks = reduced_blocks(psi, partition, owner)
        trace = sum(float(np.trace(b).real) for _, b in blocks.values())
    elif method == "nla":
        trace = partial_trace_nla(psi, partition, owner).total_trace
    else:
        raise ValueError(f"unknown method {method!r}")
    return ValidityReport(abs(trace - 1.0) <= 1e-10, trace, {"subsystem": owner})


def check_c2(
    state: FockVector, partition: Partition, traced: str | None = None, method: str = "ssr"
) -> ValidityReport:
    """Every reduced sector matrix must be pure.

    ``value`` is the smallest sector purity; ``detail`` records whether the
    state is separable in the superselection sense, the premise of C2.
    """
    traced = traced or partition.names[0]
    psi = state.normalized()
    separable = is_ssr_separable(psi, partition).separable
    if method == "ssr":
        purities = {s.key: s.rho.purity() for s in partial_trace(psi, partition, traced)}
        worst = min(purities.values())
    elif method == "nla":
        worst = partial_trace_nla(psi, partition, traced).purity()
        purities = {"all": worst}
    else:
        raise ValueError(f"unknown method {method!r}")
    return ValidityReport(worst >= 1 - 1e-9, worst, {"separable": separable, "purities": purities})


@dataclass(frozen=True, eq=False)
class FactorizedState:
    """Coefficients of a bipartite state in ``H_first (x) H_second``.

    ``coeffs[i, j]`` multiplies ``|first_basis[i]> (x) |second_basis[j]>``,
    which corresponds to the occupation key of both parts merged, with the
    fermionic sign of placing the first part's labels leftmost.
    """

    statistics: Statistics
    space: ModeSpace
    partition: Partition
    first_basis: tuple
    second_basis: tuple
    coeffs: np.ndarray

    @property
    def names(self) -> tuple[str, str]:
        return self.partition.bipartite()

    def with_coeffs(self, coeffs) -> "FactorizedState":
        return FactorizedState(
            self.statistics, self.space, self.partition, self.first_basis, self.second_basis,
            np.asarray(coeffs, dtype=complex),
        )

    def to_fock(self) -> FockVector:
        return unfactorize(self)

    def sector_blocks(self) -> dict[tuple[SectorKey, SectorKey], tuple[list[int], list[int]]]:
        """Row/column index lists for each (first sector, second sector) pair."""
        rows: dict[SectorKey, list[int]] = {}
        cols: dict[SectorKey, list[int]] = {}
        for i, k in enumerate(self.first_basis):
            rows.setdefault(sector_key(len(k), self.statistics), []).append(i)
        for j, k in enumerate(self.second_basis):
            cols.setdefault(sector_key(len(k), self.statistics), []).append(j)
        return {
            (a, b): (rows[a], cols[b])
            for a in sorted(rows, key=_sector_order)
            for b in sorted(cols, key=_sector_order)
        }


def factorize_bipartite(
    state: FockVector, partition: Partition, max_particles: int | None = None
) -> FactorizedState:
    """Map a bipartite Fock vector to its coefficient matrix over local bases.

    Local bases enumerate every occupation key of each subsystem with at most
    ``max_particles`` particles (default: the state's largest particle number).
    """
    first, second = partition.bipartite()
    partition.check_covers(state.space)
    nmax = max(state.particle_numbers(), default=0) if max_particles is None else max_particles
    fb = partition.local_basis(state.space, first, state.statistics, nmax)
    sb = partition.local_basis(state.space, second, state.statistics, nmax)
    fi = {k: i for i, k in enumerate(fb)}
    si = {k: j for j, k in enumerate(sb)}
    coeffs = np.zeros((len(fb), len(sb)), dtype=complex)
    fermion = state.statistics is FERMION
    for key, amp in state.items():
        a, b, sign = partition.split(key, first)
        if a not in fi or b not in si:
            raise ValueError("max_particles too small for the state's local occupations")
        coeffs[fi[a], si[b]] += amp * (sign if fermion else 1)
    return FactorizedState(state.statistics, state.space, partition, tuple(fb), tuple(sb), coeffs)


def unfactorize(fs: FactorizedState) -> FockVector:
    terms: dict[Key, complex] = {}
    for i, j in zip(*np.nonzero(np.abs(fs.coeffs) >= 1e-15)):
        key, sign = join_keys(fs.first_basis[i], fs.second_basis[j], fs.statistics)
        terms[key] = terms.get(key, 0j) + sign * fs.coeffs[i, j]
    return FockVector(fs.statistics, fs.space, terms, validate=False)


def local_product(
    first: FockVector, second: FockVector, partition: Partition
) -> FockVector:
    """``first (x) second`` for vectors local to the two subsystems, in order."""
    a, b = partition.bipartite()
    partition.check_local(first, a)
    partition.check_local(second, b)
    terms: dict[Key, complex] = {}
    for ka, va in first.items():
        for kb, vb in second.items():
            key, sign = join_keys(ka, kb, first.statistics)
            terms[key] = terms.get(key, 0j) + sign * va * vb
    return FockVector(first.statistics, first.space, terms, validate=False)


@dataclass(frozen=True)
class SeparabilityReport:
    separable: bool
    ranks: dict
    singular_values: dict


def is_ssr_separable(state: FockVector, partition: Partition) -> SeparabilityReport:
    """Rank-one test of every superselection block of the factorized state.

    Blocks pair a sector of the first subsystem with a sector of the second;
    singular values beyond the first must fall below ``RANK_TOL``.
    """
    fs = factorize_bipartite(state, partition)
    ranks, svals = {}, {}
    for pair, (rows, cols) in fs.sector_blocks().items():
        block = fs.coeffs[np.ix_(rows, cols)]
        s = np.linalg.svd(block, compute_uv=False)
        if s.size == 0 or s[0] < RANK_TOL:
            continue
        svals[pair] = s
        ranks[pair] = int(np.sum(s >= RANK_TOL))
    return SeparabilityReport(all(r <= 1 for r in ranks.values()), ranks, svals)


def separable_pairwise(state: FockVector, partition: Partition) -> bool:
    """Multipartite separability via every one-versus-rest cut."""
    if len(partition.names) == 2:
        return is_ssr_separable(state, partition).separable
    for name in partition.names:
        rest = set().union(*(partition.modes(n) for n in partition.names if n != name))
        cut = Partition.of({name: partition.modes(name), "rest": rest})
        if not is_ssr_separable(state, cut).separable:
            return False
    return True

