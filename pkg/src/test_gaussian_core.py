import math

import numpy as np
import pytest

from src.errors import DegenerateSpectrumError, DomainError, UnsupportedFormError
from src.gaussian_core import (
    GaussianChannelSpec,
    GaussianState,
    NormalFormCM,
    apply_channel,
    beam_splitter,
    coherent_state,
    loss_on_signal,
    loss_on_signal_dilated,
    lossy_channel,
    normal_form_decompose,
    symplectic_form,
    symplectic_spectrum_generic,
    thermal_state,
    tmsv_state,
    williamson,
)


# -------- STATES --------

def test_tmsv_vacuum_is_identity():
    state = tmsv_state(0.0)
    assert np.allclose(state.cm, np.eye(4))
    assert np.allclose(state.mean, 0.0)


def test_tmsv_blocks_for_one_photon():
    cm = tmsv_state(1.0).cm
    assert np.allclose(cm[:2, :2], 3.0 * np.eye(2))
    assert np.allclose(cm[2:, 2:], 3.0 * np.eye(2))
    assert np.allclose(cm[:2, 2:], math.sqrt(8.0) * np.diag([1.0, -1.0]))


@pytest.mark.parametrize("nbar", [0.0, 0.5, 1.0, 5.0, 10.0])
def test_tmsv_is_pure(nbar):
    assert np.allclose(tmsv_state(nbar).symplectic_eigenvalues, 1.0, atol=1e-10)


@pytest.mark.parametrize("nbar", [-0.1, float("nan"), float("inf")])
def test_tmsv_rejects_bad_nbar(nbar):
    with pytest.raises(DomainError):
        tmsv_state(nbar)


@pytest.mark.parametrize("alpha, mean", [(0, (0.0, 0.0)), (1, (2.0, 0.0)), (1j, (0.0, 2.0))])
def test_coherent_state_mean_convention(alpha, mean):
    state = coherent_state(alpha)
    assert state.n_modes == 1
    assert np.allclose(state.mean, mean)
    assert np.allclose(state.cm, np.eye(2))


def test_unphysical_cm_is_rejected():
    with pytest.raises(DomainError):
        GaussianState(1, np.zeros(2), 0.5 * np.eye(2))


def test_asymmetric_cm_is_rejected():
    with pytest.raises(DomainError):
        GaussianState(1, np.zeros(2), np.array([[2.0, 0.1], [0.0, 2.0]]))


# -------- CHANNELS --------

def test_lossy_channel_matrices():
    spec = lossy_channel(0.25)
    assert np.allclose(spec.k_matrix, 0.5 * np.eye(2))
    assert np.allclose(spec.n_matrix, 0.75 * np.eye(2))
    assert np.allclose(spec.d, 0.0)

    ideal = lossy_channel(1.0)
    assert np.allclose(ideal.k_matrix, np.eye(2))
    assert np.allclose(ideal.n_matrix, 0.0)

    total = lossy_channel(0.0)
    assert np.allclose(total.k_matrix, 0.0)
    assert np.allclose(total.n_matrix, np.eye(2))


@pytest.mark.parametrize("tau", [-0.01, 1.01])
def test_lossy_channel_rejects_tau(tau):
    with pytest.raises(DomainError):
        lossy_channel(tau)


def test_identity_channel_leaves_state_unchanged():
    spec = GaussianChannelSpec(np.eye(2), np.zeros((2, 2)), np.zeros(2))
    state = tmsv_state(2.0)
    out = apply_channel(state, spec, 1)
    assert np.allclose(out.cm, state.cm)
    assert np.allclose(out.mean, state.mean)


def test_loss_on_coherent_state():
    vacuum = apply_channel(coherent_state(1), lossy_channel(0.0), 0)
    assert np.allclose(vacuum.mean, 0.0)
    assert np.allclose(vacuum.cm, np.eye(2))

    damped = apply_channel(coherent_state(1), lossy_channel(0.25), 0)
    assert np.allclose(damped.mean, [1.0, 0.0])
    assert np.allclose(damped.cm, np.eye(2))


def test_apply_channel_rejects_mode_index():
    with pytest.raises(DomainError):
        apply_channel(coherent_state(1), lossy_channel(0.5), 1)


def test_loss_on_signal_blocks():
    out = loss_on_signal(tmsv_state(1.0), 0.25)
    assert np.allclose(out.cm[:2, :2], 1.5 * np.eye(2))
    assert np.allclose(out.cm[:2, 2:], math.sqrt(2.0) * np.diag([1.0, -1.0]))
    assert np.allclose(out.cm[2:, 2:], 3.0 * np.eye(2))


def test_total_loss_decorrelates():
    out = loss_on_signal(tmsv_state(1.0), 0.0)
    assert np.allclose(out.cm, np.diag([1.0, 1.0, 3.0, 3.0]))


def test_no_loss_keeps_tmsv():
    state = tmsv_state(1.0)
    assert np.allclose(loss_on_signal(state, 1.0).cm, state.cm)


@pytest.mark.parametrize("nbar", [0.0, 0.5, 1.0, 5.0, 10.0])
@pytest.mark.parametrize("tau", [0.0, 0.25, 0.5, 0.9, 1.0])
def test_dilation_matches_direct_loss(nbar, tau):
    state = tmsv_state(nbar)
    direct = loss_on_signal(state, tau)
    dilated = loss_on_signal_dilated(state, tau)
    assert np.allclose(direct.cm, dilated.cm, rtol=0.0, atol=1e-12)
    assert np.allclose(direct.mean, dilated.mean, rtol=0.0, atol=1e-12)


@pytest.mark.parametrize("tau", [0.0, 0.3, 1.0])
def test_beam_splitter_is_symplectic(tau):
    bs = beam_splitter(tau)
    omega = symplectic_form(2)
    assert np.allclose(bs @ omega @ bs.T, omega, atol=1e-14)


# -------- DECOMPOSITION --------

def test_decompose_vacuum():
    dec = normal_form_decompose(NormalFormCM(1.0, 1.0, 0.0))
    assert dec.nu_minus == pytest.approx(1.0)
    assert dec.nu_plus == pytest.approx(1.0)
    assert np.allclose(dec.s_matrix, np.eye(4))


def test_decompose_lossy_tmsv():
    dec = normal_form_decompose(NormalFormCM(1.5, 3.0, math.sqrt(2.0)))
    assert dec.nu_minus == pytest.approx(1.0, abs=1e-12)
    assert dec.nu_plus == pytest.approx(2.5, abs=1e-12)
    assert dec.s_matrix[0, 0] == pytest.approx(math.sqrt(8.0 / 7.0), abs=1e-6)
    assert dec.s_matrix[0, 2] == pytest.approx(math.sqrt(1.0 / 7.0), abs=1e-6)
    assert np.allclose(dec.reconstruct(), NormalFormCM(1.5, 3.0, math.sqrt(2.0)).to_matrix(), atol=1e-10)


def test_decompose_orders_eigenvalues_when_first_mode_is_noisier():
    nf = NormalFormCM(3.0, 1.5, math.sqrt(2.0))
    dec = normal_form_decompose(nf)
    assert dec.nu_minus == pytest.approx(1.0, abs=1e-12)
    assert dec.nu_plus == pytest.approx(2.5, abs=1e-12)
    assert np.allclose(dec.reconstruct(), nf.to_matrix(), rtol=0.0, atol=1e-10)
    omega = symplectic_form(2)
    assert np.allclose(dec.s_matrix @ omega @ dec.s_matrix.T, omega, rtol=0.0, atol=1e-10)


@pytest.mark.parametrize("mu", [1.0, 3.0, 21.0])
def test_decompose_tmsv_is_trivial(mu):
    dec = normal_form_decompose(NormalFormCM(mu, mu, math.sqrt(mu ** 2 - 1.0)))
    assert dec.nu_minus == pytest.approx(1.0, abs=1e-9)
    assert dec.nu_plus == pytest.approx(1.0, abs=1e-9)


def test_decompose_rejects_negative_c():
    with pytest.raises(UnsupportedFormError):
        normal_form_decompose(NormalFormCM(2.0, 2.0, -0.5))


def test_decompose_rejects_degenerate_form():
    with pytest.raises(DegenerateSpectrumError):
        normal_form_decompose(NormalFormCM(1.0, 1.0, 1.0))


def test_from_cm_rejects_non_normal_form():
    cm = np.eye(4)
    cm[0, 1] = cm[1, 0] = 0.2
    with pytest.raises(UnsupportedFormError):
        NormalFormCM.from_cm(cm)


def test_random_normal_forms():
    rng = np.random.default_rng(20240611)
    omega = symplectic_form(2)
    for _ in range(1000):
        a, b = rng.uniform(1.0, 20.0, size=2)
        c = math.sqrt(rng.uniform(0.0, 1.0) * (a * b - max(a, b) + 1.0))
        nf = NormalFormCM(a, b, c)
        dec = normal_form_decompose(nf)

        assert np.allclose(dec.reconstruct(), nf.to_matrix(), rtol=0.0, atol=1e-9)
        assert np.allclose(dec.s_matrix @ omega @ dec.s_matrix.T, omega, rtol=0.0, atol=1e-9)

        generic = symplectic_spectrum_generic(nf.to_matrix())
        assert 1.0 - 1e-9 <= dec.nu_minus <= dec.nu_plus
        assert np.allclose([dec.nu_minus, dec.nu_plus], generic, rtol=0.0, atol=1e-9)


def test_generic_spectrum_examples():
    assert symplectic_spectrum_generic(np.eye(4)) == pytest.approx((1.0, 1.0))
    assert symplectic_spectrum_generic(2.0 * np.eye(4)) == pytest.approx((2.0, 2.0))
    lossy = loss_on_signal(tmsv_state(1.0), 0.25)
    assert symplectic_spectrum_generic(lossy.cm) == pytest.approx((1.0, 2.5), abs=1e-9)


def test_generic_spectrum_rejects_asymmetric():
    cm = np.eye(4)
    cm[0, 2] = 0.3
    with pytest.raises(DomainError):
        symplectic_spectrum_generic(cm)


def test_williamson_single_mode():
    thermal = thermal_state(1.0)
    dec = williamson(thermal)
    assert dec.nu_minus == pytest.approx(3.0)
    assert np.allclose(dec.reconstruct(), thermal.cm)
    omega = symplectic_form(1)
    assert np.allclose(dec.s_matrix @ omega @ dec.s_matrix.T, omega)
