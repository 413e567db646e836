from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from condsqueeze.dynamics import TimeGrid, evolve, evolve_stroboscopic, frame_map, leakage
from condsqueeze.errors import ConfigError, LayoutError, LeakageAbort, NormDriftAbort
from condsqueeze.experiments import initial_state, reference_drive
from condsqueeze.frames import frame_transform, hadamard_frame, identity_frame
from condsqueeze.model import HamiltonianKind as K, HamiltonianSpec, TimeDependentOperator, build_hamiltonian
from condsqueeze.observables import squeezing_point
from condsqueeze.operators import (
    Fock, HilbertLayout, QState, expectation, fidelity, fock_vector, matrix_exponential, number,
    product_state, qubit_vector,
)

P = reference_drive()


def fock_generator(n, omega):
    lay = HilbertLayout((Fock(n),))
    return TimeDependentOperator(lay, [(omega, number(lay, 0))]), lay


# -- grids ---------------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(ConfigError):
        TimeGrid(0, 1, 0)
    with pytest.raises(ConfigError):
        TimeGrid(1, 1, 0.1)
    with pytest.raises(ConfigError):
        TimeGrid(0, 1, 0.1, 0)


@given(st.floats(1e-3, 1.0), st.integers(1, 400), st.integers(1, 50))
def test_grid_samples_end_exactly(span, n, every):
    g = TimeGrid(0.0, span, span / n, every)
    times = g.sample_times()
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(span, rel=1e-12)
    assert np.all(np.diff(times) > 0)


def test_grid_rabi_rule():
    g = TimeGrid(0, 1e-6, 1e-9)
    with pytest.raises(ConfigError):
        g.check_resolves(2 * math.pi * 40e6)
    TimeGrid(0, 1e-6, 0.4e-9).check_resolves(2 * math.pi * 41.6e6)


# -- basic evolutions --------------------------------------------------------------------

def test_zero_hamiltonian_is_identity():
    h, lay = fock_generator(4, 0.0)
    psi = QState(lay, np.array([0.5, 0.5j, -0.5, 0.5]))
    rec = evolve(h, psi, TimeGrid(0, 1.0, 0.01, 10), leakage_tol=None)
    for s in rec.states:
        assert np.array_equal(s.vector, psi.vector)


def test_number_state_phase_over_100_periods():
    omega = 1.0
    h, lay = fock_generator(3, omega)
    psi = QState(lay, fock_vector(3, 1))
    period = 2 * math.pi / omega
    rec = evolve(h, psi, TimeGrid(0, 100 * period, period / 1500, 15000))
    for t, s in zip(rec.times, rec.states):
        assert abs(s.vector[1] - np.exp(-1j * omega * t)) < 1e-8


def test_effective_squeezing_closed_form_variance():
    lay = HilbertLayout.qubit_modes(40)
    h = build_hamiltonian(HamiltonianSpec(K.EFFECTIVE_SQUEEZING, 1, P), lay)
    t_end = 0.5 * P.delta_omega / abs(P.g) ** 2
    psi0 = product_state(lay, [qubit_vector("g"), fock_vector(40, 0)])
    rec = evolve(h, psi0, TimeGrid(0, t_end, t_end / 400, 400))
    vmin = squeezing_point(rec.final_state, 1).var_min
    assert vmin == pytest.approx(math.exp(-1) / 4, abs=1e-4)


def test_determinism_bitwise():
    lay = HilbertLayout.qubit_modes(20)
    h = build_hamiltonian(HamiltonianSpec(K.FULL_DISPLACED, 1, P), lay)
    psi = initial_state(P, lay, "g", "displaced")
    grid = TimeGrid(0, 0.1e-6, 0.5e-9, 20)
    a, b = evolve(h, psi, grid), evolve(h, psi, grid)
    for x, y in zip(a.states, b.states):
        assert np.array_equal(x.vector, y.vector)
    assert np.array_equal(a.leakage, b.leakage)


def test_fourth_order_convergence_band():
    lay = HilbertLayout.qubit_modes(30)
    h = build_hamiltonian(HamiltonianSpec(K.FULL_DISPLACED, 1, P), lay)
    psi = initial_state(P, lay, "g", "displaced")
    span = 0.2e-6
    dt = 2 * math.pi / (P.rabi + P.delta_omega) / 50

    def end(step):
        return evolve(h, psi, TimeGrid(0, span, step, 10 ** 9)).final_state.vector

    ref = end(dt / 8)
    e1 = np.linalg.norm(end(dt) - ref)
    e2 = np.linalg.norm(end(dt / 2) - ref)
    assert 8 <= e1 / e2 <= 32


def test_energy_conserved_for_static_generator():
    lay = HilbertLayout.qubit_modes(30)
    h = build_hamiltonian(HamiltonianSpec(K.EFFECTIVE_SQUEEZING, 1, P), lay)
    psi = product_state(lay, [qubit_vector("+"), fock_vector(30, 0)])
    rec = evolve(h, psi, TimeGrid(0, 5e-6, 5e-9, 50))
    hop = h.constant
    e0 = expectation(psi, hop).real
    scale = abs(hop.dense()).max()
    for s in rec.states:
        assert abs(expectation(s, hop).real - e0) < 1e-8 * scale


def test_leakage_series_recomputable():
    lay = HilbertLayout.qubit_modes(13)
    h = build_hamiltonian(HamiltonianSpec(K.EFFECTIVE_SQUEEZING, 1, P), lay)
    psi = product_state(lay, [qubit_vector("g"), fock_vector(13, 0)])
    rec = evolve(h, psi, TimeGrid(0, 4e-6, 10e-9, 40), leakage_tol=None)
    for s, lk in zip(rec.states, rec.leakage):
        t = np.abs(s.tensor()) ** 2
        assert lk == t[:, 12:].sum()  # ceil(0.9*13) = 12
        assert lk == leakage(s)


def test_leakage_abort_keeps_partial_record():
    lay = HilbertLayout.qubit_modes(13)
    h = build_hamiltonian(HamiltonianSpec(K.EFFECTIVE_SQUEEZING, 1, P), lay)
    psi = product_state(lay, [qubit_vector("g"), fock_vector(13, 0)])
    with pytest.raises(LeakageAbort) as info:
        evolve(h, psi, TimeGrid(0, 20e-6, 10e-9, 10))
    rec = info.value.record
    assert rec.status == "leakage"
    assert rec.leakage[-1] > 1e-6
    assert np.all(rec.leakage[:-1] <= 1e-6)


def test_norm_drift_abort():
    h, lay = fock_generator(6, 1.0)
    psi = QState(lay, np.ones(6) / math.sqrt(6))
    with pytest.raises(NormDriftAbort) as info:
        evolve(h, psi, TimeGrid(0, 10.0, 1.0))
    assert info.value.record.status == "norm_drift"


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_norm_conservation_random(seed):
    rng = np.random.default_rng(seed)
    lay = HilbertLayout.qubit_modes(5)
    m = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    from condsqueeze.operators import QOperator

    hop = QOperator(lay, (m + m.conj().T) / 2)
    h = TimeDependentOperator(lay, [(lambda t: math.cos(3 * t), hop)])
    v = rng.normal(size=10) + 1j * rng.normal(size=10)
    rec = evolve(h, QState(lay, v / np.linalg.norm(v)), TimeGrid(0, 2.0, 1e-3, 100), leakage_tol=None)
    assert np.all(rec.norm_drift < 1e-6)
    assert all(abs(s.norm() - 1) < 1e-9 for s in rec.states)


def test_initial_state_checks():
    h, lay = fock_generator(3, 1.0)
    with pytest.raises(ConfigError):
        evolve(h, QState(lay, np.array([1.0, 1.0, 0.0])), TimeGrid(0, 1, 0.1))
    other = HilbertLayout((Fock(4),))
    with pytest.raises(LayoutError):
        evolve(h, QState(other, fock_vector(4, 0)), TimeGrid(0, 1, 0.1))


# -- stroboscopic sampling ---------------------------------------------------------------

def test_stroboscopic_one_period_matches_effective():
    dw = P.delta_omega
    p = reference_drive(g=0.01 * dw)
    lay = HilbertLayout.qubit_modes(30)
    period = 2 * math.pi / dw
    mod = build_hamiltonian(HamiltonianSpec(K.MODULATED_COUPLING, 1, p), lay)
    eff = build_hamiltonian(HamiltonianSpec(K.EFFECTIVE_SQUEEZING, 1, p), lay)
    for q in ("g", "+"):
        psi0 = product_state(lay, [qubit_vector(q), fock_vector(30, 0)])
        rec = evolve_stroboscopic(mod, psi0, period, 1, steps_per_period=400)
        target = matrix_exponential(eff.constant, -1j * period) @ psi0
        assert fidelity(rec.final_state, target) >= 1 - 1e-4


def test_stroboscopic_zero_periods_is_identity():
    h, lay = fock_generator(3, 1.0)
    psi = QState(lay, fock_vector(3, 2))
    rec = evolve_stroboscopic(h, psi, 1.0, 0)
    assert len(rec) == 1 and rec.final_state is psi


def test_stroboscopic_sample_times():
    h, lay = fock_generator(3, 1.0)
    psi = QState(lay, fock_vector(3, 1))
    period = 0.7
    rec = evolve_stroboscopic(h, psi, period, 5, steps_per_period=64)
    k = np.arange(6)
    assert np.all(np.abs(rec.times - k * period) <= period / 64)


# -- frame maps --------------------------------------------------------------------------

def _small_record():
    lay = HilbertLayout.qubit_modes(10)
    h = build_hamiltonian(HamiltonianSpec(K.MODULATED_COUPLING, 1, P), lay)
    psi = product_state(lay, [qubit_vector("+"), fock_vector(10, 0)])
    return evolve(h, psi, TimeGrid(0, 1e-6, 2e-9, 50)), lay


def test_frame_map_identity_and_involution():
    rec, lay = _small_record()
    same = frame_map(rec, identity_frame(lay))
    for a, b in zip(rec.states, same.states):
        assert np.allclose(a.vector, b.vector, atol=1e-15)
    twice = frame_map(frame_map(rec, hadamard_frame(lay)), hadamard_frame(lay))
    for a, b in zip(rec.states, twice.states):
        assert np.allclose(a.vector, b.vector, atol=1e-14)


def test_frame_map_layout_mismatch():
    rec, _ = _small_record()
    with pytest.raises(LayoutError):
        frame_map(rec, identity_frame(HilbertLayout.qubit_modes(11)))


def test_frame_equivalence_reduced_parameters():
    # same check as the acceptance criterion, at a small drive so the driven frame stays cheap
    p = reference_drive(abar0=1.0, rabi=2 * math.pi * 8e6)
    from condsqueeze.model import driven_fock_dim

    lay = HilbertLayout.qubit_modes(driven_fock_dim(1.0))
    period = 2 * math.pi / p.delta_omega
    grid = TimeGrid(0, period, 0.5e-9, 250)
    disp = build_hamiltonian(HamiltonianSpec(K.FULL_DISPLACED, 1, p), lay)
    drv = build_hamiltonian(HamiltonianSpec(K.FULL_DRIVEN, 1, p), lay)
    rec_d = evolve(disp, initial_state(p, lay, "g", "displaced"), grid, leakage_tol=None)
    rec_l = evolve(drv, initial_state(p, lay, "g", "driven"), grid, leakage_tol=None)
    mapped = frame_map(rec_l, frame_transform(p, lay, "driven", "displaced"))
    for a, b in zip(mapped.states, rec_d.states):
        assert fidelity(a, b) > 0.999
