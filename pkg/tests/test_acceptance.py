"""Acceptance gate: one test per criterion, each recording a pass/fail line.

The summary lines are printed in the terminal report under
"acceptance criteria".
"""
import math
import time

import numpy as np

from sea_entanglement.bell import (
    ChshSettings,
    bell_like_state,
    chsh_value,
    classical_chsh_bound,
    prepare_bell_like_state,
)
from sea_entanglement.cli import sweep_rows
from sea_entanglement.entanglement import (
    ghjw_connecting_unitary,
    ghjw_realize_ensemble,
    max_entropy_scan,
    schmidt_decompose,
    ssr_entropy,
)
from sea_entanglement.fock import BOSON, FERMION, FockVector, ModeLabel, ModeSpace
from sea_entanglement.locality import (
    check_c1,
    check_c2,
    factorize_bipartite,
    is_ssr_separable,
    partial_trace,
    partial_trace_nla,
    sector_key,
)
from sea_entanglement.oracle import run_equivalence_trials

from random_states import (
    XY,
    random_boson_separable,
    random_fermion_parity,
    random_fermion_separable,
    random_global,
    random_local,
    random_unitary,
)
from test_locality import _nssr_state

TSIRELSON = 2 * math.sqrt(2)
H = 1 / math.sqrt(2)


def _random_space(rng, statistics):
    return ModeSpace(2, int(rng.integers(1, 4 if statistics is FERMION else 3)))


def _sweep_peak(statistics, expected, acceptance, number):
    start = time.perf_counter()
    _, rows = sweep_rows(2, statistics, 101)
    elapsed = time.perf_counter() - start
    best = max(rows, key=lambda row: row[2])
    ok = abs(best[2] - expected) <= 1e-9 and abs(best[0] - H) <= 1e-9 and elapsed < 1.0
    acceptance.record(
        number,
        ok,
        f"{statistics.value} sweep max {best[2]:.12f} at r={best[0]:.12f} (expected {expected}), {elapsed:.3f}s",
    )
    assert ok


def test_criterion_1_two_fermion_maximum(acceptance):
    _sweep_peak(FERMION, 1.0, acceptance, 1)


def test_criterion_2_two_boson_maximum(acceptance):
    _sweep_peak(BOSON, 0.5, acceptance, 2)


def test_criterion_3_fermion_maximum_is_n_minus_one(acceptance):
    start = time.perf_counter()
    details, ok = [], True
    for n in (2, 3, 4):
        scan = max_entropy_scan(n, step=0.05)
        good = abs(scan.balanced - (n - 1)) <= 1e-9 and scan.is_local_max
        ok &= good
        details.append(f"N={n}: {scan.balanced:.12f} > {scan.max_perturbed:.6f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30
    acceptance.record(3, ok, "; ".join(details) + f", {elapsed:.2f}s")
    assert ok


def test_criterion_4_chsh(acceptance):
    start = time.perf_counter()
    psi = bell_like_state()
    value = chsh_value(psi, ChshSettings.optimal())
    classical = classical_chsh_bound()
    rng = np.random.default_rng(20240601)
    worst = max(abs(chsh_value(psi, ChshSettings.random(rng))) for _ in range(10_000))
    elapsed = time.perf_counter() - start
    ok = abs(abs(value) - TSIRELSON) <= 1e-9 and classical == 2 and worst <= TSIRELSON + 1e-9 and elapsed < 10
    acceptance.record(
        4, ok, f"|CHSH|={abs(value):.12f}, classical={classical}, max over 1e4 random={worst:.12f}, {elapsed:.2f}s"
    )
    assert ok


def test_criterion_5_bell_preparation(acceptance):
    prep = prepare_bell_like_state()
    fidelity = abs(prep.state.inner(bell_like_state())) ** 2
    ok = fidelity > 1 - 1e-10 and abs(prep.probability - 0.5) <= 1e-12
    acceptance.record(5, ok, f"fidelity={fidelity:.15f}, probability={prep.probability:.15f}")
    assert ok


def test_criterion_6_partial_trace_validity(acceptance):
    rng = np.random.default_rng(6)
    instances = 500
    c1_fail = c2_fail = 0
    nssr_err = 0.0
    for _ in range(instances):
        stats = BOSON if rng.random() < 0.5 else FERMION
        space = _random_space(rng, stats)
        name = "X" if rng.random() < 0.5 else "Y"
        local = random_local(space, stats, XY, name, rng, max_particles=2)
        c1_fail += not check_c1(local, XY).ok

        if stats is FERMION:
            sep = random_fermion_separable(space, int(rng.integers(0, 2)), rng)
        else:
            sep = random_boson_separable(space, int(rng.integers(1, 4)), rng, superpose=bool(rng.random() < 0.5))
        c2_fail += not (check_c2(sep, XY, "X").ok and check_c2(sep, XY, "Y").ok)

        n_total = int(rng.integers(1, 4))
        n_traced = int(rng.integers(0, n_total))
        psi = _nssr_state(rng, n_total, n_traced)
        nla = partial_trace_nla(psi, XY, "X", particle_number=n_traced)
        (sector,) = partial_trace(psi, XY, "X").sectors
        idx = [sector.rho.basis.index(k) for k in nla.operator_basis]
        nssr_err = max(nssr_err, float(np.abs(nla.operator - sector.rho.matrix[np.ix_(idx, idx)]).max()))

    sp = ModeSpace(2, 2)
    worked = partial_trace_nla(FockVector(BOSON, sp, {(ModeLabel(0, 0), ModeLabel(0, 1)): 1}), XY, "X")
    worked_ok = (
        worked.scalar == 1
        and worked.operator_basis == ((ModeLabel(0, 0),), (ModeLabel(0, 1),))
        and np.array_equal(worked.operator, np.eye(2))
        and not np.any(worked.coherence)
    )
    ok = c1_fail == 0 and c2_fail == 0 and worked_ok and nssr_err <= 1e-10
    acceptance.record(
        6,
        ok,
        f"{instances} instances: C1 failures={c1_fail}, C2 failures={c2_fail}, "
        f"interior-product example exact={worked_ok}, fixed-number agreement err={nssr_err:.2e}",
    )
    assert ok


def test_criterion_7_oracle_equivalence(acceptance):
    start = time.perf_counter()
    report = run_equivalence_trials(seed=7000, trials=500)
    elapsed = time.perf_counter() - start
    ok = report.ok and elapsed < 120
    acceptance.record(
        7,
        ok,
        f"500 instances, {report.checks} comparisons, max error {report.max_error:.2e}, "
        f"first failing seed {report.first_failing_seed}, {elapsed:.1f}s",
    )
    assert ok


def _sector_unitary(fs, rng):
    n = len(fs.second_basis)
    u = np.zeros((n, n), dtype=complex)
    groups: dict = {}
    for j, k in enumerate(fs.second_basis):
        groups.setdefault(sector_key(len(k), fs.statistics), []).append(j)
    for idx in groups.values():
        u[np.ix_(idx, idx)] = random_unitary(len(idx), rng)
    return u


def test_criterion_8_ghjw(acceptance):
    rng = np.random.default_rng(8)
    worst_pair = worst_ensemble = 0.0
    for _ in range(100):
        stats = BOSON if rng.random() < 0.5 else FERMION
        space = _random_space(rng, stats)
        n = int(rng.integers(1, min(3, space.dim) + 1))
        psi = random_global(space, stats, n, rng)
        fs = factorize_bipartite(psi, XY)
        psi_prime = fs.with_coeffs(fs.coeffs @ _sector_unitary(fs, rng).T).to_fock()
        worst_pair = max(worst_pair, ghjw_connecting_unitary(psi, psi_prime, XY).residual)
    for _ in range(100):
        stats = BOSON if rng.random() < 0.5 else FERMION
        space = _random_space(rng, stats)
        n = int(rng.integers(1, min(3, space.dim) + 1))
        psi = random_global(space, stats, n, rng)
        sf = schmidt_decompose(psi, XY)
        ensemble = [(w, sf.left_vector(a, stats, space)) for a, w in enumerate(sf.weights)]
        worst_ensemble = max(worst_ensemble, ghjw_realize_ensemble(ensemble, psi, XY).residual)
    ok = worst_pair < 1e-8 and worst_ensemble < 1e-8
    acceptance.record(
        8, ok, f"max unitary residual {worst_pair:.2e} (100 pairs), max ensemble residual {worst_ensemble:.2e} (100 states)"
    )
    assert ok


def test_criterion_9_entropy_separability_consistency(acceptance):
    rng = np.random.default_rng(9)
    mismatches, asym, separable_count = 0, 0.0, 0
    for i in range(500):
        stats = BOSON if rng.random() < 0.5 else FERMION
        space = _random_space(rng, stats)
        if i % 2 == 0:
            psi = (
                random_fermion_separable(space, int(rng.integers(0, 2)), rng)
                if stats is FERMION
                else random_boson_separable(space, int(rng.integers(1, 4)), rng, superpose=bool(rng.random() < 0.5))
            )
        else:
            psi = (
                random_fermion_parity(space, int(rng.integers(0, 2)), rng)
                if stats is FERMION
                else random_global(space, BOSON, int(rng.integers(1, 4)), rng)
            )
        e_x = ssr_entropy(psi, XY, "X").total
        e_y = ssr_entropy(psi, XY, "Y").total
        separable = is_ssr_separable(psi, XY).separable
        separable_count += separable
        mismatches += (e_x < 1e-9) != separable
        asym = max(asym, abs(e_x - e_y))
    ok = mismatches == 0 and asym <= 1e-10
    acceptance.record(
        9, ok, f"500 states ({separable_count} separable): iff mismatches={mismatches}, max swap asymmetry={asym:.2e}"
    )
    assert ok
