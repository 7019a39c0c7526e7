"""Assignment of spatial modes to named subsystems."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import LocalityViolation, Unsupported
from .fock import FERMION, FockVector, Key, ModeLabel, ModeSpace, Statistics, occupation_keys


@dataclass(frozen=True)
class Partition:
    """Ordered disjoint assignment of spatial mode indices to subsystems."""

    subsystems: tuple[tuple[str, frozenset], ...]

    def __post_init__(self):
        seen: set[int] = set()
        names = [name for name, _ in self.subsystems]
        if len(set(names)) != len(names):
            raise ValueError("subsystem names must be unique")
        for name, modes in self.subsystems:
            if not modes:
                raise ValueError(f"subsystem {name!r} owns no spatial modes")
            if seen & modes:
                raise ValueError(f"subsystem {name!r} overlaps another subsystem")
            seen |= modes

    @classmethod
    def of(cls, mapping: Mapping[str, Iterable[int]]) -> "Partition":
        return cls(tuple((str(name), frozenset(int(m) for m in modes)) for name, modes in mapping.items()))

    @classmethod
    def by_mode(cls, space: ModeSpace) -> "Partition":
        """One subsystem per spatial mode, named after the mode."""
        return cls.of({name: [i] for i, name in enumerate(space.spatial_names)})

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.subsystems)

    def modes(self, name: str) -> frozenset:
        for sub, modes in self.subsystems:
            if sub == name:
                return modes
        raise KeyError(f"no subsystem named {name!r}")

    def owner(self, spatial: int) -> str:
        for name, modes in self.subsystems:
            if spatial in modes:
                return name
        raise KeyError(f"spatial mode {spatial} not assigned to any subsystem")

    def check_covers(self, space: ModeSpace) -> None:
        covered = set().union(*(m for _, m in self.subsystems))
        if covered != set(range(space.n_spatial)):
            raise ValueError("partition must cover every spatial mode exactly once")

    def bipartite(self) -> tuple[str, str]:
        if len(self.subsystems) != 2:
            raise Unsupported("operation supports bipartite partitions only")
        return self.names[0], self.names[1]

    def other(self, name: str) -> str:
        first, second = self.bipartite()
        if name == first:
            return second
        if name == second:
            return first
        raise KeyError(f"no subsystem named {name!r}")

    def labels(self, space: ModeSpace, name: str) -> list[ModeLabel]:
        modes = self.modes(name)
        return [lab for lab in space.labels if lab.spatial in modes]

    def is_local(self, vector: FockVector, name: str) -> bool:
        modes = self.modes(name)
        return all(lab.spatial in modes for key in vector.keys() for lab in key)

    def check_local(self, vector: FockVector, name: str) -> None:
        if not self.is_local(vector, name):
            raise LocalityViolation(f"state has support outside subsystem {name!r}")

    def split(self, key: Key, name: str) -> tuple[Key, Key, int]:
        """Split ``key`` into (labels in ``name``, remaining labels, sign).

        ``sign`` is the fermionic parity of moving the ``name`` labels to the
        front while keeping both groups in canonical order; callers apply it
        only for fermions.
        """
        modes = self.modes(name)
        inside, outside = [], []
        crossings = 0
        for lab in key:
            if lab.spatial in modes:
                inside.append(lab)
                crossings += len(outside)
            else:
                outside.append(lab)
        return tuple(inside), tuple(outside), (-1) ** crossings

    def local_basis(
        self, space: ModeSpace, name: str, statistics: Statistics, max_particles: int
    ) -> list[Key]:
        """Occupation keys local to ``name`` with at most ``max_particles`` particles."""
        labels = self.labels(space, name)
        if statistics is FERMION:
            max_particles = min(max_particles, len(labels))
        keys: list[Key] = []
        for n in range(max_particles + 1):
            keys.extend(occupation_keys(labels, n, statistics))
        return keys


def join_keys(first: Key, second: Key, statistics: Statistics) -> tuple[Key | None, int]:
    """Canonical key and sign for ``first`` placed before ``second``.

    Returns ``(None, 0)`` when a fermionic mode would be doubly occupied.
    """
    merged = tuple(sorted(first + second))
    if statistics is FERMION:
        if len(set(merged)) != len(merged):
            return None, 0
        crossings = sum(1 for a in first for b in second if b < a)
        return merged, (-1) ** crossings
    return merged, 1
