"""Creation, annihilation, interior and local inner products on Fock vectors."""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import TypeMismatch
from .fock import (
    BOSON,
    FERMION,
    FockVector,
    Key,
    ModeLabel,
    SingleParticleState,
    multiplicity_factor,
)
from .partition import Partition


def _check(psi: SingleParticleState, v: FockVector):
    if psi.space != v.space:
        raise TypeMismatch("single-particle state and Fock vector use different mode spaces")


def create_mode(label: ModeLabel, v: FockVector) -> FockVector:
    """a^dag on a single basis mode."""
    out: dict[Key, complex] = {}
    for key, amp in v.items():
        if v.statistics is BOSON:
            pos = bisect_right(key, label)
            n = key.count(label)
            coeff = math.sqrt(n + 1)
        else:
            pos = bisect_left(key, label)
            if pos < len(key) and key[pos] == label:
                continue
            coeff = (-1) ** pos
        new = key[:pos] + (label,) + key[pos:]
        out[new] = out.get(new, 0j) + coeff * amp
    return FockVector(v.statistics, v.space, out, validate=False)


def annihilate_mode(label: ModeLabel, v: FockVector) -> FockVector:
    """a on a single basis mode."""
    out: dict[Key, complex] = {}
    for key, amp in v.items():
        pos = bisect_left(key, label)
        if pos == len(key) or key[pos] != label:
            continue
        if v.statistics is BOSON:
            coeff = math.sqrt(key.count(label))
        else:
            coeff = (-1) ** pos
        new = key[:pos] + key[pos + 1 :]
        out[new] = out.get(new, 0j) + coeff * amp
    return FockVector(v.statistics, v.space, out, validate=False)


def create(psi: SingleParticleState, v: FockVector) -> FockVector:
    """a^dag(psi) v: prepend ``psi`` to every product in ``v``."""
    _check(psi, v)
    total = FockVector.zero(v.statistics, v.space)
    for label in psi.support():
        total = total + psi[label] * create_mode(label, v)
    return total


def annihilate(psi: SingleParticleState, v: FockVector) -> FockVector:
    """a(psi) v, antilinear in ``psi``; the vacuum maps to zero."""
    _check(psi, v)
    total = FockVector.zero(v.statistics, v.space)
    for label in psi.support():
        total = total + psi[label].conjugate() * annihilate_mode(label, v)
    return total


def commutator_check(
    psi: SingleParticleState, phi: SingleParticleState, sample: FockVector
) -> float:
    """Residual of the canonical (anti)commutation relations on ``sample``.

    Evaluates both ``[a(psi), a^dag(phi)]_-+ - <psi|phi>`` and
    ``[a(psi), a(phi)]_-+`` on the sample and returns the larger norm.
    """
    sign = -1.0 if sample.statistics is BOSON else 1.0
    overlap = psi.inner(phi)
    mixed = (
        annihilate(psi, create(phi, sample))
        + sign * create(phi, annihilate(psi, sample))
        - overlap * sample
    )
    pure = annihilate(psi, annihilate(phi, sample)) + sign * annihilate(
        phi, annihilate(psi, sample)
    )
    return max(mixed.norm(), pure.norm())


def interior_product(bra: FockVector, ket: FockVector) -> FockVector:
    """Contract the fixed-number ``bra`` against ``ket``.

    For a bra key ``(b_1..b_n)`` the contraction is
    ``a_{b_n} ... a_{b_1} ket / sqrt(prod n_k!)`` (rightmost factor first),
    i.e. the adjoint of prepending the bra's particles.
    """
    if bra.statistics is not ket.statistics or bra.space != ket.space:
        raise TypeMismatch("bra and ket must share statistics and mode space")
    numbers = bra.particle_numbers()
    if len(numbers) > 1:
        raise ValueError("interior product needs a bra with a fixed particle number")
    total = FockVector.zero(ket.statistics, ket.space)
    for key, amp in bra.items():
        term = ket
        for label in key:
            term = annihilate_mode(label, term)
            if not len(term):
                break
        if len(term):
            total = total + (amp.conjugate() / multiplicity_factor(key)) * term
    return total


@dataclass(frozen=True)
class LocalState:
    """A Fock vector declared to live on a single subsystem."""

    subsystem: str
    vector: FockVector

    @classmethod
    def on(cls, partition: Partition, subsystem: str, vector: FockVector) -> "LocalState":
        partition.check_local(vector, subsystem)
        return cls(subsystem, vector)


def local_inner_product(phi: LocalState, v: FockVector, partition: Partition) -> FockVector:
    """<phi| o |v>: project the ``phi.subsystem`` factor of every term of ``v``.

    Each key of ``v`` is split into its subsystem part and the complement
    (fermions pick up the parity of moving the subsystem labels leftmost);
    the subsystem part is overlapped with ``phi`` as an ordinary inner
    product, so mismatched local particle numbers contribute nothing.
    """
    partition.check_local(phi.vector, phi.subsystem)
    if phi.vector.statistics is not v.statistics or phi.vector.space != v.space:
        raise TypeMismatch("local state and vector must share statistics and mode space")
    bra = phi.vector.terms
    out: dict[Key, complex] = {}
    fermion = v.statistics is FERMION
    for key, amp in v.items():
        local, rest, sign = partition.split(key, phi.subsystem)
        coeff = bra.get(local)
        if coeff is None:
            continue
        value = coeff.conjugate() * amp * (sign if fermion else 1)
        out[rest] = out.get(rest, 0j) + value
    return FockVector(v.statistics, v.space, out, validate=False)


def number_operator(v: FockVector, labels) -> FockVector:
    """sum_m a^dag_m a_m over ``labels`` applied to ``v``."""
    total = FockVector.zero(v.statistics, v.space)
    for label in labels:
        total = total + create_mode(label, annihilate_mode(label, v))
    return total


def transform_modes(v: FockVector, unitary) -> FockVector:
    """Apply the Fock-space lift of a single-particle unitary.

    ``unitary`` is a ``dim x dim`` matrix over the flat mode index; each
    creation operator ``a^dag_b`` is replaced by ``sum_c U[c, b] a^dag_c``.
    """
    u = np.asarray(unitary, dtype=complex)
    space = v.space
    if u.shape != (space.dim, space.dim):
        raise ValueError("unitary must act on the full single-particle space")
    images = [u[:, j] for j in range(space.dim)]
    total = FockVector.zero(v.statistics, space)
    for key, amp in v.items():
        term = FockVector.vacuum(v.statistics, space)
        for label in reversed(key):
            col = images[space.index(label)]
            term = create(SingleParticleState(space, col), term) * np.linalg.norm(col)
        total = total + (amp / multiplicity_factor(key)) * term
    return total
