from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from condsqueeze.errors import ConfigError, LayoutError, TruncationError
from condsqueeze.experiments import one_period_error, reference_drive, reference_tms
from condsqueeze.model import (
    DriveParams, HamiltonianKind as K, HamiltonianSpec, TmsParams, auto_delta_q, build_hamiltonian,
    displacement_trajectory, drive_waveform, driven_fock_dim, khz, mhz, photon_limits, tms_trajectories,
)
from condsqueeze.operators import (
    Fock, HilbertLayout, QState, annihilator, fidelity, fock_vector, matrix_exponential, number, pauli,
    product_state, qubit_vector, squeeze,
)

P = reference_drive()
L1 = HilbertLayout.qubit_modes(20)
L2 = HilbertLayout.qubit_modes(6, 6)


# -- parameters ----------------------------------------------------------------------

def test_g_back_solves_abar0():
    assert P.abar0 == pytest.approx(2 * P.g / P.chi)
    assert abs(P.abar0) == pytest.approx(6.4)
    p = DriveParams(chi=P.chi, rabi=P.rabi, delta_omega=P.delta_omega, abar0=3.0)
    assert p.g == pytest.approx(P.chi * 3.0 / 2)


def test_inconsistent_g_and_abar0_rejected():
    with pytest.raises(ConfigError):
        DriveParams(chi=P.chi, rabi=P.rabi, delta_omega=P.delta_omega, abar0=1.0, g=mhz(0.16))


def test_frequency_hierarchy_enforced():
    with pytest.raises(ConfigError):
        DriveParams(chi=P.chi, rabi=mhz(1.0), delta_omega=mhz(2.0), g=mhz(0.1))


def test_from_mhz_matches_angular():
    p = DriveParams.from_mhz(-50.0, 40.0, 1.6, g_mhz=0.16)
    assert p.chi == pytest.approx(khz(-50.0))
    assert p.g == pytest.approx(P.g)


def test_tms_chi_ref_defaults_to_chi_a():
    t = TmsParams(chi_a=khz(-40), chi_b=khz(-60), rabi=mhz(40), delta_omega=mhz(1.6), g=mhz(0.16))
    assert t.chi_ref == t.chi_a
    assert t.g == pytest.approx(t.chi_ref * t.abar0 / 2)


def test_spec_rejects_two_mode_correction():
    with pytest.raises(ConfigError):
        HamiltonianSpec(K.EFFECTIVE_WITH_CORRECTION, 2, reference_tms())


# -- drive and trajectories ----------------------------------------------------------

def test_drive_waveform_at_zero():
    assert drive_waveform(P, 0.0) == pytest.approx(-1j * P.abar0 * (P.rabi + P.delta_omega))


def test_drive_waveform_periodic():
    lo, hi = P.rabi - P.delta_omega, P.rabi + P.delta_omega
    # both sideband frequencies are integer multiples of 2 delta_omega here
    base = 2 * P.delta_omega
    assert lo / base == pytest.approx(round(lo / base)) and hi / base == pytest.approx(round(hi / base))
    period = 2 * math.pi / base
    t = np.linspace(0, period, 97)
    assert np.allclose(drive_waveform(P, t + period), drive_waveform(P, t), atol=1e-6 * abs(P.abar0) * hi)


def test_zero_amplitude_drive_vanishes():
    p = P.replace(abar0=0.0)
    assert np.all(drive_waveform(p, np.linspace(0, 1e-6, 11)) == 0)


def test_trajectory_initial_value_and_bound():
    assert displacement_trajectory(P, 0.0) == pytest.approx(-1j * P.abar0)
    t = np.linspace(0, 5e-6, 4001)
    assert np.all(np.abs(displacement_trajectory(P, t)) <= math.sqrt(2) * abs(P.abar0) + 1e-12)


def test_trajectory_solves_driven_equation_of_motion():
    # lab amplitude beta = -abar obeys d beta/dt = -i eps(t)
    def rhs(t, y):
        e = drive_waveform(P, t)
        d = -1j * e
        return [d.real, d.imag]

    b0 = -displacement_trajectory(P, 0.0)
    t_end = 0.3e-6
    sol = solve_ivp(rhs, (0, t_end), [b0.real, b0.imag], rtol=1e-10, atol=1e-12, dense_output=True)
    ts = np.linspace(0, t_end, 50)
    beta = sol.sol(ts)[0] + 1j * sol.sol(ts)[1]
    assert np.allclose(beta, -displacement_trajectory(P, ts), atol=1e-6)


def test_tms_trajectories_examples():
    p = reference_tms()
    a0, b0 = tms_trajectories(p, 0.0)
    assert abs(a0) == pytest.approx(abs(p.abar0 * p.chi_ref / p.chi_a))
    assert b0 == 0
    tq = math.pi / (2 * p.delta_omega)
    aq, bq = tms_trajectories(p, tq)
    assert abs(aq) < 1e-12 * abs(p.abar0)
    assert abs(bq) == pytest.approx(abs(p.abar0))
    t = np.linspace(0, 3e-6, 301)
    a, b = tms_trajectories(p, t)
    assert np.allclose(np.abs(a) ** 2 + np.abs(b) ** 2, abs(p.abar0) ** 2)


def test_tms_trajectories_need_nonzero_chi():
    p = TmsParams(chi_a=khz(-50), chi_b=0.0, rabi=mhz(40), delta_omega=mhz(1.6), abar0=2.0)
    with pytest.raises(ConfigError):
        tms_trajectories(p, 0.0)


# -- photon limits ----------------------------------------------------------------------

def test_photon_limits_reference_values():
    n1, n2, n3 = photon_limits(P)
    assert n1 == pytest.approx(1600)
    assert n3 == pytest.approx(100)
    assert n2 == pytest.approx((2 * 40 / (0.05 * 6.4)) ** 2)


def test_photon_limits_unbounded_without_chi():
    p = DriveParams(chi=0.0, rabi=P.rabi, delta_omega=P.delta_omega, abar0=2.0)
    assert all(math.isinf(x) for x in photon_limits(p))


def test_auto_delta_q_values():
    assert auto_delta_q(P) == pytest.approx(-P.chi * abs(P.abar0) ** 2 / 2)
    assert auto_delta_q(P.replace(delta_q="cancel")) == pytest.approx(-P.chi * abs(P.abar0) ** 2)
    t = reference_tms()
    n0 = abs(t.abar0) ** 2
    assert auto_delta_q(t) == pytest.approx(-n0 * t.chi_ref ** 2 * (1 / t.chi_a + 1 / t.chi_b) / 2)


# -- Hamiltonians -----------------------------------------------------------------------

ONE_MODE = [K.FULL_DISPLACED, K.MODULATED_COUPLING, K.EFFECTIVE_SQUEEZING, K.EFFECTIVE_WITH_CORRECTION]
TWO_MODE = [K.FULL_DISPLACED, K.MODULATED_COUPLING, K.EFFECTIVE_SQUEEZING]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ONE_MODE), st.floats(0, 5e-6), st.floats(-np.pi, np.pi))
def test_single_mode_hermitian(kind, t, phase):
    p = P.replace(g=P.g * np.exp(1j * phase))
    h = build_hamiltonian(HamiltonianSpec(kind, 1, p), L1)
    assert h(t).is_hermitian(1e-10)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(TWO_MODE), st.floats(0, 5e-6))
def test_two_mode_hermitian(kind, t):
    h = build_hamiltonian(HamiltonianSpec(kind, 2, reference_tms(chi_b=khz(-35))), L2)
    assert h(t).is_hermitian(1e-10)


def test_full_driven_hermitian_and_dim_guard():
    small = P.replace(abar0=1.0)
    need = driven_fock_dim(1.0)
    h = build_hamiltonian(HamiltonianSpec(K.FULL_DRIVEN, 1, small), HilbertLayout.qubit_modes(need))
    assert h(1.3e-7).is_hermitian(1e-10)
    with pytest.raises(TruncationError):
        build_hamiltonian(HamiltonianSpec(K.FULL_DRIVEN, 1, small), HilbertLayout.qubit_modes(need - 1))


def test_layout_mismatch_rejected():
    with pytest.raises(LayoutError):
        build_hamiltonian(HamiltonianSpec(K.EFFECTIVE_SQUEEZING, 1, P), L2)


def test_apply_matches_assembled_operator():
    h = build_hamiltonian(HamiltonianSpec(K.FULL_DISPLACED, 1, P), L1)
    rng = np.random.default_rng(3)
    v = rng.normal(size=L1.total_dim) + 1j * rng.normal(size=L1.total_dim)
    t = 0.731e-6
    assert np.allclose(h.apply(t, v), h(t).dense() @ v)


def test_effective_squeezing_is_time_independent_squeeze():
    h = build_hamiltonian(HamiltonianSpec(K.EFFECTIVE_SQUEEZING, 1, P), L1 := HilbertLayout.qubit_modes(40))
    assert h.is_time_independent
    t = 2e-6
    kappa = abs(P.g) ** 2 * t / P.delta_omega
    out = matrix_exponential(h.constant, -1j * t) @ product_state(L1, [qubit_vector("g"), fock_vector(40, 0)])
    mode = HilbertLayout((Fock(40),))
    vac = QState(mode, fock_vector(40, 0))
    # real g: qubit g squeezes with xi = -i g^2 t / delta_omega, i.e. |xi| = g^2 t / delta_omega
    target = squeeze(mode, 0, -1j * kappa) @ vac
    assert fidelity(out, product_state(L1, [qubit_vector("g"), target.vector])) == pytest.approx(1, abs=1e-10)
    # cross-check by diagonalization
    w, v = np.linalg.eigh(h.constant.dense())
    psi0 = product_state(L1, [qubit_vector("g"), fock_vector(40, 0)]).vector
    alt = v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0))
    assert abs(np.vdot(alt, out.vector)) ** 2 == pytest.approx(1, abs=1e-10)


def test_modulated_coupling_quarter_period_is_anti_jc():
    for mc, lay in ((1, L1), (2, L2)):
        p = P if mc == 1 else reference_tms()
        h = build_hamiltonian(HamiltonianSpec(K.MODULATED_COUPLING, mc, p), lay)
        sp_, sm = pauli(lay, "plus"), pauli(lay, "minus")
        m = annihilator(lay, lay.fock_indices[-1])
        expect = -(p.g * (sp_ @ m.dag()) + np.conj(p.g) * (sm @ m))
        t = math.pi / (2 * p.delta_omega)
        assert np.abs((h(t) - expect).dense()).max() < 1e-9 * abs(p.g)


def test_full_displaced_without_drive():
    p = P.replace(abar0=0.0, delta_q=mhz(0.3))
    h = build_hamiltonian(HamiltonianSpec(K.FULL_DISPLACED, 1, p), L1)
    sx, sz = pauli(L1, "x"), pauli(L1, "z")
    expect = sx * (p.rabi / 2) + sz * (p.resolved_delta_q / 2) + (sz @ number(L1, 1)) * (p.chi / 2)
    for t in (0.0, 0.37e-6, 1.1e-6):
        assert np.abs((h(t) - expect).dense()).max() < 1e-6


def _sigma_z_coefficient(h, t):
    lay = h.layout
    m = h(t).dense()
    d = lay.dims[1]
    return 0.5 * (m[d, d] - m[0, 0]).real  # <e,0|H|e,0> - <g,0|H|g,0>


@pytest.mark.parametrize("mode", ["cancel", "auto"])
def test_stark_shift_time_average(mode):
    p = P.replace(delta_q=mode)
    h = build_hamiltonian(HamiltonianSpec(K.FULL_DISPLACED, 1, p), L1)
    period = 2 * math.pi / p.delta_omega
    ts = np.linspace(0, period, 4001)[:-1]
    avg = np.mean([_sigma_z_coefficient(h, t) for t in ts])
    scale = abs(p.chi) * abs(p.abar0) ** 2
    if mode == "cancel":
        assert abs(avg) < 1e-3 * scale
    else:
        # the "auto" convention removes half of the static shift
        assert avg == pytest.approx(p.chi * abs(p.abar0) ** 2 / 4, rel=1e-3)


@pytest.mark.parametrize("ratio", [0.005, 0.01, 0.02, 0.05])
def test_magnus_one_period_operator_norm(ratio):
    # C frozen from a one-off fit at ratio 0.05 (measured 10.1), rounded up
    assert one_period_error(ratio, fock_dim=30, n_low=6) <= 12.0 * ratio ** 2
