"""JSON state specifications.

A specification names the statistics, the spatial modes, the number of
internal levels and a partition of the modes into subsystems, and gives the
state either as single-particle amplitude maps (one per particle, combined by
a symmetric or exterior product) or as explicit occupation amplitudes::

    {"statistics": "fermion", "modes": ["X", "Y"], "internal_dim": 2,
     "particles": [{"X:0": [0.7071, 0], "Y:0": [-0.7071, 0]}, ...],
     "partition": {"X": ["X"], "Y": ["Y"]}}

    {"statistics": "fermion", "modes": ["X", "Y"], "internal_dim": 2,
     "occupation": [{"labels": "X:0 X:1", "amplitude": [0.7071, 0]}, ...],
     "partition": {"X": ["X"], "Y": ["Y"]}}

Amplitudes are stored exactly as read; normalization happens when the Fock
vector is built, so load, serialize and load again is bitwise stable.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import SpecError
from .fock import FERMION, FockVector, ModeSpace, SingleParticleState, Statistics, product_state
from .partition import Partition

log = logging.getLogger(__name__)

RENORMALIZE_WARN = 1e-6
UNIT_NORM_SLACK = 1e-14


def _complex(value: Any, path: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise SpecError(path, "expected a complex number as [re, im]")
    re, im = float(value[0]), float(value[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        raise SpecError(path, "amplitude must be finite")
    return complex(re, im)


def _warn_if_renormalized(norm: float, path: str) -> None:
    if abs(norm - 1.0) > RENORMALIZE_WARN:
        log.warning("%s: renormalized from norm %.9g", path, norm)


@dataclass(frozen=True)
class StateSpec:
    statistics: Statistics
    modes: tuple[str, ...]
    internal_dim: int
    partition: tuple[tuple[str, tuple[str, ...]], ...]
    particles: tuple[tuple[tuple[str, complex], ...], ...] | None = None
    occupation: tuple[tuple[str, complex], ...] | None = None

    # parsing
    @classmethod
    def from_dict(cls, data: Any) -> "StateSpec":
        if not isinstance(data, dict):
            raise SpecError("$", "specification must be a JSON object")
        known = {"statistics", "modes", "internal_dim", "particles", "occupation", "partition"}
        for key in data:
            if key not in known:
                raise SpecError(f"$.{key}", "unknown field")
        for key in ("statistics", "modes", "partition"):
            if key not in data:
                raise SpecError(f"$.{key}", "required field missing")
        try:
            statistics = Statistics.parse(data["statistics"])
        except ValueError as exc:
            raise SpecError("$.statistics", str(exc)) from None

        modes = data["modes"]
        if not isinstance(modes, list) or not modes or not all(isinstance(m, str) and m for m in modes):
            raise SpecError("$.modes", "expected a nonempty list of mode names")
        for i, m in enumerate(modes):
            if ":" in m or " " in m:
                raise SpecError(f"$.modes[{i}]", "mode names may not contain ':' or spaces")
        if len(set(modes)) != len(modes):
            raise SpecError("$.modes", "mode names must be unique")

        internal_dim = data.get("internal_dim", 1)
        if not isinstance(internal_dim, int) or isinstance(internal_dim, bool) or internal_dim < 1:
            raise SpecError("$.internal_dim", "expected a positive integer")

        partition = data["partition"]
        if not isinstance(partition, dict) or not partition:
            raise SpecError("$.partition", "expected a nonempty object of subsystem -> mode names")
        seen: dict[str, str] = {}
        parts = []
        for name, members in partition.items():
            path = f"$.partition.{name}"
            if not isinstance(members, list) or not members:
                raise SpecError(path, "expected a nonempty list of mode names")
            for j, m in enumerate(members):
                if m not in modes:
                    raise SpecError(f"{path}[{j}]", f"unknown mode {m!r}")
                if m in seen:
                    raise SpecError(f"{path}[{j}]", f"mode {m!r} already assigned to {seen[m]!r}")
                seen[m] = name
            parts.append((name, tuple(members)))
        missing = [m for m in modes if m not in seen]
        if missing:
            raise SpecError("$.partition", f"modes not assigned to any subsystem: {missing}")

        has_p, has_o = "particles" in data, "occupation" in data
        if has_p == has_o:
            raise SpecError("$", "exactly one of 'particles' or 'occupation' must be given")
        space = ModeSpace(len(modes), internal_dim, tuple(modes))

        particles = occupation = None
        if has_p:
            raw = data["particles"]
            if not isinstance(raw, list) or not raw:
                raise SpecError("$.particles", "expected a nonempty list of amplitude maps")
            out = []
            for i, amp_map in enumerate(raw):
                path = f"$.particles[{i}]"
                if not isinstance(amp_map, dict) or not amp_map:
                    raise SpecError(path, "expected a nonempty object of label -> [re, im]")
                entries = []
                for label, value in amp_map.items():
                    _label(space, label, f"{path}.{label}")
                    entries.append((label, _complex(value, f"{path}.{label}")))
                if all(v == 0 for _, v in entries):
                    raise SpecError(path, "single-particle state has zero norm")
                out.append(tuple(entries))
            particles = tuple(out)
        else:
            raw = data["occupation"]
            if not isinstance(raw, list) or not raw:
                raise SpecError("$.occupation", "expected a nonempty list of {labels, amplitude}")
            out = []
            for i, entry in enumerate(raw):
                path = f"$.occupation[{i}]"
                if not isinstance(entry, dict) or set(entry) != {"labels", "amplitude"}:
                    raise SpecError(path, "expected an object with 'labels' and 'amplitude'")
                if not isinstance(entry["labels"], str):
                    raise SpecError(f"{path}.labels", "expected a label string like 'X:0 Y:1'")
                _occupation_labels(space, statistics, entry["labels"], f"{path}.labels")
                out.append((entry["labels"], _complex(entry["amplitude"], f"{path}.amplitude")))
            if all(v == 0 for _, v in out):
                raise SpecError("$.occupation", "state has zero norm")
            occupation = tuple(out)
        return cls(statistics, tuple(modes), internal_dim, tuple(parts), particles, occupation)

    @classmethod
    def loads(cls, text: str) -> "StateSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError("$", f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> "StateSpec":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise SpecError("$", f"cannot read {path}: {exc.strerror}") from None
        return cls.loads(text)

    @classmethod
    def from_state(cls, state: FockVector, partition: Partition) -> "StateSpec":
        """Occupation-form specification of an existing vector."""
        space = state.space
        parts = tuple(
            (name, tuple(space.spatial_names[m] for m in sorted(partition.modes(name))))
            for name in partition.names
        )
        occupation = tuple(
            (space.format_key(k), complex(v)) for k, v in sorted(state.items(), key=lambda kv: (len(kv[0]), kv[0]))
        )
        return cls(state.statistics, space.spatial_names, space.n_internal, parts, None, occupation)

    # serialization
    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "statistics": self.statistics.value,
            "modes": list(self.modes),
            "internal_dim": self.internal_dim,
        }
        if self.particles is not None:
            out["particles"] = [
                {label: [v.real, v.imag] for label, v in entries} for entries in self.particles
            ]
        else:
            out["occupation"] = [
                {"labels": labels, "amplitude": [v.real, v.imag]} for labels, v in self.occupation
            ]
        out["partition"] = {name: list(members) for name, members in self.partition}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    # construction
    @property
    def space(self) -> ModeSpace:
        return ModeSpace(len(self.modes), self.internal_dim, self.modes)

    def partition_object(self) -> Partition:
        index = {m: i for i, m in enumerate(self.modes)}
        return Partition.of({name: [index[m] for m in members] for name, members in self.partition})

    def state(self) -> FockVector:
        """Normalized Fock vector; a vanishing exterior product raises ZeroWedge."""
        space = self.space
        if self.particles is not None:
            states = []
            for i, entries in enumerate(self.particles):
                vec = np.zeros(space.dim, dtype=complex)
                for label, v in entries:
                    vec[space.index(space.parse_label(label))] += v
                _warn_if_renormalized(float(np.linalg.norm(vec)), f"$.particles[{i}]")
                states.append(SingleParticleState(space, vec))
            return product_state(states, self.statistics)
        total = FockVector.zero(self.statistics, space)
        for labels, v in self.occupation:
            parsed = [space.parse_label(t) for t in labels.split()] if labels.strip() != "vac" else []
            total = total + v * FockVector.basis_state(self.statistics, space, parsed)
        norm = total.norm()
        if norm < 1e-12:
            raise SpecError("$.occupation", "amplitudes cancel to a zero vector")
        _warn_if_renormalized(norm, "$.occupation")
        if abs(norm - 1.0) <= UNIT_NORM_SLACK:
            return total  # already unit up to rounding; keep the stored amplitudes bit for bit
        return total / norm


def _label(space: ModeSpace, text: str, path: str):
    try:
        name, sep, level = text.partition(":")
        if not sep or not level.isdigit():
            raise ValueError("labels have the form 'mode:level'")
        return space.parse_label(text)
    except ValueError as exc:
        raise SpecError(path, str(exc)) from None


def _occupation_labels(space: ModeSpace, statistics: Statistics, text: str, path: str):
    if text.strip() == "vac":
        return []
    tokens = text.split()
    if not tokens:
        raise SpecError(path, "empty label string (use 'vac' for the vacuum)")
    labels = [_label(space, t, path) for t in tokens]
    if statistics is FERMION and len(set(labels)) != len(labels):
        raise SpecError(path, "fermionic occupation repeats a mode")
    return labels
