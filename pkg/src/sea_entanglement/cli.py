"""Command-line front end.

Results go to standard output as a JSON object (CSV for ``sweep``).  Exit
codes: 0 success, 2 invalid input, 3 numerical-contract violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from . import errors
from .bell import BlochVector, ChshSettings, chsh_value, classical_chsh_bound
from .entanglement import ghjw_connecting_unitary, schmidt_decompose, ssr_entropy, two_mode_partition, two_mode_state
from .fock import FERMION, Statistics
from .locality import is_ssr_separable, partial_trace
from .oracle import run_equivalence_trials
from .specfile import StateSpec

EXIT_OK, EXIT_INVALID, EXIT_CONTRACT = 0, 2, 3

log = logging.getLogger("sea_entanglement")

CONTRACT_ERRORS = (
    errors.NumericalContractViolation,
    errors.NotCoPurifications,
    errors.NotAnEnsembleOf,
    errors.EncodingViolation,
    errors.NotNormalized,
)


class ContractFailure(Exception):
    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _matrix(m: np.ndarray) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _sector_name(key) -> str:
    return str(key)


def _entropy_report(spec: StateSpec, traced: str | None) -> dict:
    psi, partition = spec.state(), spec.partition_object()
    first, second = partition.bipartite()
    traced = traced or first
    report = ssr_entropy(psi, partition, traced)
    swapped = ssr_entropy(psi, partition, partition.other(traced))
    return {
        "traced": traced,
        "kept": report.kept,
        "total_entropy_bits": report.total,
        "swapped_total_entropy_bits": swapped.total,
        "sectors": [
            {"sector": _sector_name(s.key), "probability": s.probability, "entropy_bits": s.entropy}
            for s in report.per_sector
        ],
    }


def cmd_entropy(args) -> dict:
    return _entropy_report(StateSpec.load(args.spec), args.trace)


def cmd_reduce(args) -> dict:
    spec = StateSpec.load(args.spec)
    psi, partition = spec.state(), spec.partition_object()
    if args.trace not in partition.names:
        raise errors.SpecError("--trace", f"unknown subsystem {args.trace!r}; choose from {list(partition.names)}")
    dec = partial_trace(psi, partition, args.trace)
    return {
        "traced": args.trace,
        "kept": dec.kept,
        "sectors": [
            {
                "sector": _sector_name(s.key),
                "probability": s.probability,
                "basis": s.rho.labels(),
                "matrix": _matrix(s.rho.matrix),
                "eigenvalues": [float(x) for x in s.rho.eigenvalues()],
            }
            for s in dec
        ],
    }


def cmd_separable(args) -> dict:
    spec = StateSpec.load(args.spec)
    psi, partition = spec.state(), spec.partition_object()
    rep = is_ssr_separable(psi, partition)
    schmidt = schmidt_decompose(psi, partition)
    return {
        "separable": rep.separable,
        "sector_ranks": [
            {"first_sector": _sector_name(a), "second_sector": _sector_name(b), "rank": r}
            for (a, b), r in rep.ranks.items()
        ],
        "schmidt_rank": schmidt.rank,
        "schmidt_weights": [float(w) for w in schmidt.weights],
    }


def _parse_settings(values: Sequence[str]) -> ChshSettings:
    values = [v for text in values for v in text.split(";") if v.strip()]
    if len(values) == 1 and values[0] == "optimal":
        return ChshSettings.optimal()
    if len(values) != 4:
        raise errors.SpecError("--settings", "expected 'optimal' or four vectors 'x,y,z'")
    vecs = []
    for i, text in enumerate(values):
        try:
            parts = [float(t) for t in text.split(",")]
            if len(parts) != 3:
                raise ValueError
            vecs.append(BlochVector.from_direction(*parts))
        except ValueError:
            raise errors.SpecError(f"--settings[{i}]", f"expected a nonzero vector 'x,y,z', got {text!r}") from None
    return ChshSettings(*vecs)


def cmd_chsh(args) -> dict:
    spec = StateSpec.load(args.spec)
    settings = _parse_settings(args.settings)
    value = chsh_value(spec.state(), settings, spec.partition_object())
    return {
        "value": value,
        "abs_value": abs(value),
        "tsirelson_bound": 2 * math.sqrt(2),
        "classical_bound": classical_chsh_bound(),
        "settings": {
            name: list(getattr(settings, name).as_array()) for name in ("a1", "a2", "b1", "b2")
        },
    }


def cmd_ghjw(args) -> dict:
    spec_a, spec_b = StateSpec.load(args.spec_a), StateSpec.load(args.spec_b)
    psi, psi_prime = spec_a.state(), spec_b.state()
    if psi.statistics is not psi_prime.statistics or psi.space != psi_prime.space:
        raise errors.SpecError("$", "both specifications must share statistics, modes and internal_dim")
    partition = spec_a.partition_object()
    if spec_b.partition_object() != partition:
        raise errors.SpecError("$.partition", "both specifications must use the same partition")
    result = ghjw_connecting_unitary(psi, psi_prime, partition)
    return {
        "subsystem": partition.names[1],
        "basis": result.labels(),
        "unitary": _matrix(result.unitary),
        "residual": result.residual,
    }


def sweep_grid(k: int) -> np.ndarray:
    """``k`` mixing angles uniform on [0, pi/2]; r = sin(phi), l = sqrt(1 - r^2).

    An odd ``k`` places the balanced point r = l = 1/sqrt(2) on the grid and
    both endpoints are exact.
    """
    if k < 2:
        raise errors.SpecError("--grid", "grid needs at least two points")
    return (np.pi / 2) * np.arange(k) / (k - 1)


def sweep_rows(n: int, statistics: Statistics, k: int, threads: int = 1) -> tuple[list[str], list[list[float]]]:
    if n < 1:
        raise errors.SpecError("--particles", "need at least one particle")
    sectors = ["even", "odd"] if statistics is FERMION else list(range(n + 1))
    grid = sweep_grid(k)

    def point(phi: float) -> list[float]:
        r = math.sin(phi)
        l = math.sqrt(max(0.0, 1.0 - r * r))
        psi = two_mode_state([r] * n, [l] * n, statistics)
        rep = ssr_entropy(psi, two_mode_partition(psi.space))
        probs = {s.key: s.probability for s in rep.per_sector}
        return [r, l, rep.total] + [probs.get(s, 0.0) for s in sectors]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(point, grid))
    else:
        rows = [point(r) for r in grid]
    header = ["r", "l", "total_entropy_bits"] + [f"p_Y_{s}" for s in sectors]
    return header, rows


def _threads() -> int:
    value = os.environ.get("THREADS")
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        log.warning("ignoring non-integer THREADS=%r", value)
        return 1


def cmd_sweep(args):
    header, rows = sweep_rows(args.particles, Statistics.parse(args.statistics), args.grid, _threads())
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) for x in row])
    return None


def cmd_oracle_check(args) -> dict:
    if args.trials < 1:
        raise errors.SpecError("--trials", "need at least one trial")
    report = run_equivalence_trials(args.seed, args.trials)
    payload = report.as_dict()
    if not report.ok:
        raise ContractFailure(f"oracle mismatch; first failing instance seed {report.first_failing_seed}", payload)
    return payload


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sea-entanglement",
        description="Mode entanglement of identical particles under superselection rules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="superselection-respecting entanglement entropy")
    p.add_argument("spec")
    p.add_argument("--trace", help="subsystem to trace out (default: the first)")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("reduce", help="sector-resolved reduced density matrices")
    p.add_argument("spec")
    p.add_argument("--trace", required=True, help="subsystem to trace out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("separable", help="separability verdict and Schmidt ranks")
    p.add_argument("spec")
    p.set_defaults(func=cmd_separable)

    p = sub.add_parser("chsh", help="CHSH expectation on the {vac, up-down} qubit encoding")
    p.add_argument("spec")
    p.add_argument("--settings", nargs="+", default=["optimal"], metavar="VEC",
                   help="'optimal' or four vectors a1 a2 b1 b2 written as x,y,z; "
                   "separate them with ';' in one argument (--settings='...') when one starts with '-'")
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("ghjw", help="unitary on the second subsystem connecting B to A")
    p.add_argument("spec_a")
    p.add_argument("spec_b")
    p.set_defaults(func=cmd_ghjw)

    p = sub.add_parser("sweep", help="entropy curve over r with l = sqrt(1 - r^2), as CSV")
    p.add_argument("--particles", type=int, default=2)
    p.add_argument("--statistics", choices=["b", "f", "boson", "fermion"], default="f")
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check", help="compare the pipeline against the dense oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except ContractFailure as exc:
        print(json.dumps(exc.payload, indent=2))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except CONTRACT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except errors.SpecError as exc:
        print(f"error: invalid specification at {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (errors.SeaError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if result is not None:
        print(json.dumps(result, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
