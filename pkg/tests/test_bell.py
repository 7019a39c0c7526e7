import math

import numpy as np
import pytest

from sea_entanglement.bell import (
    PARTITION,
    SPACE,
    BlochVector,
    ChshSettings,
    bell_like_state,
    chsh_operator,
    chsh_value,
    chsh_value_fock,
    classical_chsh_bound,
    deterministic_strategies,
    encode_qubit_basis,
    pauli_on_fock,
    prepare_bell_like_state,
)
from sea_entanglement.entanglement import two_mode_state
from sea_entanglement.errors import EncodingViolation
from sea_entanglement.fock import FERMION, FockVector, ModeLabel

TSIRELSON = 2 * math.sqrt(2)


def test_bell_like_state_amplitudes():
    psi = bell_like_state()
    up_down_x = (ModeLabel(0, 0), ModeLabel(0, 1))
    up_down_y = (ModeLabel(1, 0), ModeLabel(1, 1))
    assert psi.terms == {up_down_y: pytest.approx(1 / math.sqrt(2)), up_down_x: pytest.approx(-1 / math.sqrt(2))}


def test_preparation_postselects_bell_like_state():
    prep = prepare_bell_like_state()
    assert prep.probability == pytest.approx(0.5, abs=1e-12)
    assert prep.odd_probability == pytest.approx(0.5, abs=1e-12)
    assert abs(prep.state.inner(bell_like_state())) ** 2 > 1 - 1e-10
    assert (prep.state.normalized() - prep.state).norm() < 1e-12


def test_optimal_settings_constraints():
    s = ChshSettings.optimal()
    n, m, n2, m2 = (v.as_array() for v in (s.a1, s.a2, s.b1, s.b2))
    c = 1 / math.sqrt(2)
    assert n @ n2 == pytest.approx(c)
    assert m @ n2 == pytest.approx(c)
    assert m @ m2 == pytest.approx(c)
    assert -n @ m2 == pytest.approx(c)


def test_optimal_value_reaches_tsirelson():
    psi = bell_like_state()
    s = ChshSettings.optimal()
    assert abs(chsh_value(psi, s)) == pytest.approx(TSIRELSON, abs=1e-9)
    assert chsh_value_fock(psi, s) == pytest.approx(chsh_value(psi, s), abs=1e-12)


def test_random_settings_two_routes_agree_and_respect_bound():
    rng = np.random.default_rng(0)
    psi = bell_like_state()
    for _ in range(200):
        s = ChshSettings.random(rng)
        v = chsh_value(psi, s)
        assert abs(v) <= TSIRELSON + 1e-9
        assert chsh_value_fock(psi, s) == pytest.approx(v, abs=1e-10)


def test_operator_is_hermitian_with_bounded_spectrum():
    m = chsh_operator(ChshSettings.random(np.random.default_rng(1)))
    assert np.allclose(m, m.conj().T)
    assert np.abs(np.linalg.eigvalsh(m)).max() <= TSIRELSON + 1e-12


def test_pauli_action_on_encoding():
    vac = FockVector.vacuum(FERMION, SPACE)
    pair = FockVector.basis_state(FERMION, SPACE, [(0, 0), (0, 1)])
    z = BlochVector(0, 0, 1)
    x = BlochVector(1, 0, 0)
    y = BlochVector(0, 1, 0)
    assert pauli_on_fock(vac, 0, z).allclose(vac)
    assert pauli_on_fock(pair, 0, z).allclose(-pair)
    assert pauli_on_fock(vac, 0, x).allclose(pair)
    assert pauli_on_fock(vac, 0, y).allclose(1j * pair)
    assert pauli_on_fock(pair, 0, y).allclose(-1j * vac)


def test_classical_bound_is_two():
    assert len(deterministic_strategies()) == 16
    assert classical_chsh_bound() == 2


def test_encoding_violation():
    h = 1 / math.sqrt(2)
    with pytest.raises(EncodingViolation):
        chsh_value(two_mode_state([h, h], [h, h], FERMION), ChshSettings.optimal(), PARTITION)


def test_bloch_vector_checks():
    with pytest.raises(ValueError):
        BlochVector(1, 1, 0)
    with pytest.raises(ValueError):
        BlochVector.from_direction(0, 0, 0)
    assert encode_qubit_basis().basis == ("vac", "up,down")
