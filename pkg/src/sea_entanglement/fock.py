"""Occupation-basis representation of boson and fermion Fock states.

Multi-particle kets are stored sparsely as a map from canonical occupation
keys to complex amplitudes.  A key is a sorted tuple of :class:`ModeLabel`
(non-decreasing for bosons, strictly increasing for fermions); the empty
tuple is the vacuum.  Occupation keys are orthonormal: a bosonic key with
multiplicities ``n_k`` stands for ``prod(a_k^dag) |vac> / sqrt(prod n_k!)``
and a fermionic key ``(b_1 < ... < b_N)`` for
``a_{b_1}^dag ... a_{b_N}^dag |vac>``.

Symmetric and exterior products of single-particle states are expanded into
this basis with permanents and determinants.
"""
from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import SizeLimit, TypeMismatch, ZeroWedge

PRUNE = 1e-14
ATOL = 1e-9
MAX_PERMANENT_DIM = 14


class Statistics(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @classmethod
    def parse(cls, value: "Statistics | str") -> "Statistics":
        if isinstance(value, Statistics):
            return value
        text = str(value).strip().lower()
        if text in ("b", "boson", "bosons"):
            return cls.BOSON
        if text in ("f", "fermion", "fermions"):
            return cls.FERMION
        raise ValueError(f"unknown statistics {value!r}")

    @property
    def sign(self) -> int:
        """Exchange sign: +1 for bosons, -1 for fermions."""
        return 1 if self is Statistics.BOSON else -1


BOSON = Statistics.BOSON
FERMION = Statistics.FERMION


class ModeLabel(NamedTuple):
    """Single-particle basis label; tuple order is the global mode order."""

    spatial: int
    internal: int = 0


Key = tuple  # tuple[ModeLabel, ...]

_DEFAULT_NAMES = ("X", "Y", "Z", "W")


@dataclass(frozen=True)
class ModeSpace:
    """Finite single-particle space: spatial modes times internal levels."""

    n_spatial: int
    n_internal: int = 1
    spatial_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n_spatial < 1 or self.n_internal < 1:
            raise ValueError("mode space needs at least one spatial mode and one level")
        if not self.spatial_names:
            if self.n_spatial <= len(_DEFAULT_NAMES):
                names = _DEFAULT_NAMES[: self.n_spatial]
            else:
                names = tuple(f"m{i}" for i in range(self.n_spatial))
            object.__setattr__(self, "spatial_names", names)
        else:
            object.__setattr__(self, "spatial_names", tuple(self.spatial_names))
        if len(self.spatial_names) != self.n_spatial:
            raise ValueError("spatial_names must name every spatial mode")
        if len(set(self.spatial_names)) != self.n_spatial:
            raise ValueError("spatial mode names must be unique")

    @property
    def dim(self) -> int:
        return self.n_spatial * self.n_internal

    @property
    def labels(self) -> list[ModeLabel]:
        return [ModeLabel(s, i) for s in range(self.n_spatial) for i in range(self.n_internal)]

    def index(self, label: ModeLabel) -> int:
        return label.spatial * self.n_internal + label.internal

    def label(self, index: int) -> ModeLabel:
        return ModeLabel(*divmod(int(index), self.n_internal))

    def contains(self, label) -> bool:
        return (
            isinstance(label, tuple)
            and len(label) == 2
            and 0 <= label[0] < self.n_spatial
            and 0 <= label[1] < self.n_internal
        )

    def format_label(self, label: ModeLabel) -> str:
        return f"{self.spatial_names[label.spatial]}:{label.internal}"

    def format_key(self, key: Key) -> str:
        if not key:
            return "vac"
        return " ".join(self.format_label(lab) for lab in key)

    def parse_label(self, text: str) -> ModeLabel:
        name, _, level = text.strip().partition(":")
        if name not in self.spatial_names:
            raise ValueError(f"unknown spatial mode {name!r}")
        internal = int(level) if level else 0
        if not 0 <= internal < self.n_internal:
            raise ValueError(f"internal level {internal} out of range")
        return ModeLabel(self.spatial_names.index(name), internal)

    def parse_key(self, text: str) -> Key:
        text = text.strip()
        if text in ("", "vac"):
            return ()
        return tuple(sorted(self.parse_label(tok) for tok in text.split()))


def multiplicity_factor(key: Key) -> float:
    """sqrt(prod n_k!) for the occupation multiplicities of ``key``."""
    return math.sqrt(math.prod(math.factorial(n) for n in Counter(key).values()))


def sorting_sign(seq: Sequence) -> int:
    """Parity of the permutation that sorts ``seq`` (entries distinct)."""
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def check_key(key: Key, statistics: Statistics, space: ModeSpace) -> Key:
    key = tuple(ModeLabel(*lab) for lab in key)
    for lab in key:
        if not space.contains(lab):
            raise ValueError(f"mode label {lab} outside the mode space")
    for a, b in zip(key, key[1:]):
        if a > b:
            raise ValueError(f"occupation key {key} is not sorted")
        if statistics is FERMION and a == b:
            raise ValueError(f"fermionic key {key} repeats a mode")
    return key


@dataclass(frozen=True, eq=False)
class SingleParticleState:
    """Normalized complex amplitude vector over the labels of a mode space."""

    space: ModeSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} amplitudes, got {amps.shape[0]}")
        norm = np.linalg.norm(amps)
        if norm < 1e-12:
            raise ValueError("single-particle state has zero norm")
        amps = amps / norm
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_labels(cls, space: ModeSpace, amps: Mapping[ModeLabel, complex]) -> "SingleParticleState":
        vec = np.zeros(space.dim, dtype=complex)
        for lab, amp in amps.items():
            vec[space.index(ModeLabel(*lab))] += amp
        return cls(space, vec)

    @classmethod
    def basis(cls, space: ModeSpace, spatial: int, internal: int = 0) -> "SingleParticleState":
        return cls.from_labels(space, {ModeLabel(spatial, internal): 1.0})

    def __getitem__(self, label: ModeLabel) -> complex:
        return self.amplitudes[self.space.index(label)]

    def inner(self, other: "SingleParticleState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def support(self, tol: float = PRUNE) -> list[ModeLabel]:
        return [self.space.label(i) for i in np.flatnonzero(np.abs(self.amplitudes) > tol)]


class FockVector:
    """Sparse Fock-space ket over canonical occupation keys.

    Values are immutable; arithmetic returns new vectors.  Amplitudes below
    ``PRUNE`` in magnitude are dropped on construction.
    """

    __slots__ = ("statistics", "space", "_terms")

    def __init__(
        self,
        statistics: Statistics | str,
        space: ModeSpace,
        terms: Mapping[Key, complex] | Iterable[tuple[Key, complex]] = (),
        *,
        validate: bool = True,
    ):
        self.statistics = Statistics.parse(statistics)
        self.space = space
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Key, complex] = {}
        for key, amp in items:
            if validate:
                key = check_key(key, self.statistics, space)
            amp = complex(amp)
            if abs(amp) >= PRUNE:
                clean[key] = clean.get(key, 0j) + amp
        self._terms = MappingProxyType(
            {k: v for k, v in clean.items() if abs(v) >= PRUNE}
        )

    # construction helpers
    @classmethod
    def vacuum(cls, statistics, space: ModeSpace) -> "FockVector":
        return cls(statistics, space, {(): 1.0})

    @classmethod
    def zero(cls, statistics, space: ModeSpace) -> "FockVector":
        return cls(statistics, space)

    @classmethod
    def basis_state(cls, statistics, space: ModeSpace, labels: Iterable) -> "FockVector":
        """Unit vector on the occupation key built from ``labels`` (any order).

        For fermions the sign of sorting ``labels`` is applied, so the result
        equals ``a^dag_{l_1} ... a^dag_{l_n} |vac>``.
        """
        statistics = Statistics.parse(statistics)
        labels = [ModeLabel(*lab) for lab in labels]
        sign = sorting_sign(labels) if statistics is FERMION else 1
        return cls(statistics, space, {tuple(sorted(labels)): sign})

    # mapping interface
    @property
    def terms(self) -> Mapping[Key, complex]:
        return self._terms

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Key]:
        return iter(self._terms)

    def amplitude(self, key: Key) -> complex:
        return self._terms.get(tuple(key), 0j)

    def __repr__(self) -> str:
        body = ", ".join(
            f"{self.space.format_key(k)}: {v:.6g}" for k, v in sorted(self._terms.items())
        )
        return f"FockVector({self.statistics.value}, {{{body}}})"

    # structure
    def particle_numbers(self) -> list[int]:
        return sorted({len(k) for k in self._terms})

    def sector(self, n: int) -> "FockVector":
        return self._with({k: v for k, v in self._terms.items() if len(k) == n})

    def is_zero(self, tol: float = PRUNE) -> bool:
        return self.norm() < tol

    def _with(self, terms: Mapping[Key, complex]) -> "FockVector":
        return FockVector(self.statistics, self.space, terms, validate=False)

    def _check_compatible(self, other: "FockVector"):
        if not isinstance(other, FockVector):
            raise TypeMismatch(f"expected FockVector, got {type(other).__name__}")
        if other.statistics is not self.statistics:
            raise TypeMismatch("cannot combine boson and fermion vectors")
        if other.space != self.space:
            raise TypeMismatch("vectors live over different mode spaces")

    # linear algebra
    def __add__(self, other: "FockVector") -> "FockVector":
        self._check_compatible(other)
        out = dict(self._terms)
        for k, v in other.items():
            out[k] = out.get(k, 0j) + v
        return self._with(out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-1.0) * other

    def __neg__(self) -> "FockVector":
        return -1.0 * self

    def __mul__(self, scalar: complex) -> "FockVector":
        scalar = complex(scalar)
        return self._with({k: scalar * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "FockVector":
        return self * (1.0 / complex(scalar))

    def scale(self, scalar: complex) -> "FockVector":
        return self * scalar

    def inner(self, other: "FockVector") -> complex:
        """<self|other>, conjugate-linear in ``self``."""
        self._check_compatible(other)
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        total = 0j
        for k in small.keys():
            if k in large._terms:
                total += self._terms[k].conjugate() * other._terms[k]
        return total

    def norm(self) -> float:
        return math.sqrt(sum(abs(v) ** 2 for v in self._terms.values()))

    def normalized(self) -> "FockVector":
        n = self.norm()
        if n < 1e-12:
            raise ValueError("cannot normalize a zero vector")
        return self / n

    def allclose(self, other: "FockVector", atol: float = ATOL) -> bool:
        return (self - other).norm() <= atol

    def to_array(self, keys: Sequence[Key]) -> np.ndarray:
        return np.array([self.amplitude(k) for k in keys], dtype=complex)


def inner_product(a: FockVector, b: FockVector) -> complex:
    return a.inner(b)


def add(a: FockVector, b: FockVector) -> FockVector:
    return a + b


def scale(v: FockVector, c: complex) -> FockVector:
    return v * c


def normalize(v: FockVector) -> FockVector:
    return v.normalized()


def occupation_keys(labels: Sequence[ModeLabel], n: int, statistics: Statistics) -> Iterator[Key]:
    """All canonical ``n``-particle keys over the sorted ``labels``."""
    labels = sorted(labels)
    if statistics is FERMION:
        return itertools.combinations(labels, n)
    return itertools.combinations_with_replacement(labels, n)


def permanent(matrix) -> complex:
    """Permanent of a square complex matrix by Ryser's formula.

    Evaluates ``(-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij`` over all
    column subsets at once; cost O(2^n n).
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("permanent needs a square matrix")
    n = a.shape[0]
    if n > MAX_PERMANENT_DIM:
        raise SizeLimit(f"permanent limited to dimension {MAX_PERMANENT_DIM}, got {n}")
    if n == 0:
        return 1 + 0j
    subsets = (np.arange(1, 2**n)[:, None] >> np.arange(n)) & 1
    row_sums = subsets @ a.T
    signs = np.where(subsets.sum(axis=1) % 2 == n % 2, 1.0, -1.0)
    return complex(np.dot(signs, np.prod(row_sums, axis=1)))


def determinant(matrix) -> complex:
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("determinant needs a square matrix")
    if a.shape[0] == 0:
        return 1 + 0j
    return complex(np.linalg.det(a))


def amplitude_kernel(matrix, statistics: Statistics) -> complex:
    """Per for bosons, Det for fermions."""
    if Statistics.parse(statistics) is BOSON:
        return permanent(matrix)
    return determinant(matrix)


def _check_states(states: Sequence[SingleParticleState]) -> ModeSpace:
    if not states:
        raise ValueError("need at least one single-particle state")
    space = states[0].space
    for s in states[1:]:
        if s.space != space:
            raise TypeMismatch("single-particle states over different mode spaces")
    return space


def raw_product(states: Sequence[SingleParticleState], statistics) -> FockVector:
    """Unnormalized symmetric/exterior product in the occupation basis.

    The amplitude on key ``B`` is Per/Det of ``M[i, j] = <b_j|psi_i>`` divided
    by ``sqrt(prod n_k!)``; the squared norm equals Per/Det of the Gram matrix.
    """
    statistics = Statistics.parse(statistics)
    space = _check_states(states)
    n = len(states)
    amps = np.array([s.amplitudes for s in states])
    support = sorted({lab for s in states for lab in s.support()})
    terms = {}
    for key in occupation_keys(support, n, statistics):
        cols = [space.index(lab) for lab in key]
        value = amplitude_kernel(amps[:, cols], statistics)
        if statistics is BOSON:
            value /= multiplicity_factor(key)
        terms[key] = value
    return FockVector(statistics, space, terms, validate=False)


def product_state(states: Sequence[SingleParticleState], statistics) -> FockVector:
    """Normalized symmetric (bosons) or exterior (fermions) product state."""
    raw = raw_product(states, statistics)
    norm = raw.norm()
    if norm < 1e-12:
        raise ZeroWedge("exterior product vanishes: single-particle states are linearly dependent")
    return raw / norm


def gram(bra: Sequence[SingleParticleState], ket: Sequence[SingleParticleState]) -> np.ndarray:
    """Overlap matrix ``G[i, j] = <bra_i|ket_j>``."""
    a = np.array([s.amplitudes for s in bra])
    b = np.array([s.amplitudes for s in ket])
    return a.conj() @ b.T


def transition_amplitude(
    bra_states: Sequence[SingleParticleState],
    ket_states: Sequence[SingleParticleState],
    statistics,
) -> complex:
    """<bra_1..bra_N | ket_1..ket_M> between normalized product states.

    Per/Det of the overlap matrix divided by both normalization factors;
    exactly zero when the particle numbers differ.
    """
    statistics = Statistics.parse(statistics)
    if len(bra_states) != len(ket_states):
        return 0j
    if not bra_states:
        return 1 + 0j
    space = _check_states(list(bra_states) + list(ket_states))
    del space
    norm_bra = amplitude_kernel(gram(bra_states, bra_states), statistics).real
    norm_ket = amplitude_kernel(gram(ket_states, ket_states), statistics).real
    if norm_bra < 1e-24 or norm_ket < 1e-24:
        raise ZeroWedge("exterior product vanishes: single-particle states are linearly dependent")
    value = amplitude_kernel(gram(bra_states, ket_states), statistics)
    return value / math.sqrt(norm_bra * norm_ket)
