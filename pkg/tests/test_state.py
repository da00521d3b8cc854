import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import lifetime_qfi as L
from lifetime_qfi.state import lifetime_derivatives, raw_rho
from lifetime_qfi.wl_matrix import wl_pure_coefficient

DELTA = L.SpectralModel.delta()


def gauss(s):
    return L.SpectralModel.gaussian(s)


def analytic_delta_drho(eps, n_max=100):
    """d rho/d eps for the lifetime-limited mixture from closed-form d c_n / d tau."""
    n = np.arange(n_max + 1)
    out = np.zeros((n_max + 1, n_max + 1))
    for tau, dtau in ((1 / eps, -1 / eps ** 2), (eps, 1.0)):
        c = wl_pure_coefficient(n, tau, 1.0)
        amp = 2 * np.sqrt(tau) / (1 + tau)
        r = (1 - tau) / (1 + tau)
        dr = -2 / (1 + tau) ** 2
        dc = c * (0.5 / tau - 1 / (1 + tau)) + amp * n * r ** np.maximum(n - 1, 0) * dr
        out += 0.5 * dtau * (np.outer(dc, c) + np.outer(c, dc))
    return out


# --- assembly ---------------------------------------------------------------

def test_equal_lifetimes_delta_is_pure():
    rho = L.assemble_rho(L.LifetimeModel(1.0), DELTA)
    vals = np.linalg.eigvalsh(rho.matrix)
    assert vals[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.abs(vals[:-1]) < 1e-12)


def test_purity_at_quarter_width():
    rho = L.assemble_rho(L.LifetimeModel(1.0), gauss(0.25)).matrix
    assert np.sum(rho * rho) == pytest.approx(0.905, abs=0.005)


@pytest.mark.parametrize("sigma", [0.01, 0.1, 0.25, 1.0])
def test_assembled_purity_matches_limit(sigma):
    rho = L.assemble_rho(L.LifetimeModel(1.0), gauss(sigma)).matrix
    assert abs(np.sum(rho * rho) - L.purity_limit(sigma)) < 1e-4


def test_assembly_matches_time_domain_projection():
    rho = L.assemble_rho(L.LifetimeModel(1.2), gauss(0.1))
    projected = L.wl_projection(L.LifetimeModel(1.2), gauss(0.1), 100)
    assert np.max(np.abs(rho.matrix - projected)) < 1e-6


def test_assembly_records_deficit_and_normalizes():
    rho = L.assemble_rho(L.LifetimeModel(2.0), gauss(1.0))
    assert np.trace(rho.matrix) == pytest.approx(1.0, abs=1e-14)
    assert rho.trace_deficit == pytest.approx(2.5617e-5, rel=1e-3)
    assert np.max(np.abs(rho.matrix - rho.matrix.T)) < 1e-12


def test_truncation_error_for_broad_lines():
    with pytest.raises(L.TruncationError):
        L.assemble_rho(L.LifetimeModel(1.5), gauss(3.0))
    L.assemble_rho(L.LifetimeModel(1.5), gauss(3.0), L.NumericsConfig(n_max=800))


@pytest.mark.parametrize("eps", [1.3, 2.0])
@pytest.mark.parametrize("sigma", [0.0, 0.1, 0.5])
def test_inverse_epsilon_symmetry(eps, sigma):
    sp = L.SpectralModel.gaussian(sigma)
    a = L.assemble_rho(L.LifetimeModel(eps), sp).matrix
    b = L.assemble_rho(L.LifetimeModel(1 / eps), sp).matrix
    assert np.max(np.abs(a - b)) < 1e-12


def test_operator_is_read_only_and_roundtrips(tmp_path):
    rho = L.assemble_rho(L.LifetimeModel(1.1), gauss(0.1), L.NumericsConfig(n_max=8))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0
    path = tmp_path / "rho.txt"
    rho.save(path)
    back = L.HermitianOperator.load(path)
    assert np.array_equal(back.matrix, rho.matrix)
    assert back.provenance == rho.provenance


# --- derivative ---------------------------------------------------------------

@pytest.mark.parametrize("eps", [0.7, 1.05, 1.3, 2.0])
def test_delta_derivative_matches_closed_form(eps):
    d = L.d_rho_d_eps(L.LifetimeModel(eps), DELTA).matrix
    assert np.max(np.abs(d - analytic_delta_drho(eps))) < 1e-6


@pytest.mark.parametrize("sigma", [0.0, 0.1, 1.0])
def test_derivative_terms_cancel_at_equal_lifetimes(sigma):
    sp = L.SpectralModel.gaussian(sigma)
    d_fast, d_slow = lifetime_derivatives(1.0, 1e-5, sp, L.NumericsConfig())
    assert np.max(np.abs(d_fast)) > 0.1
    assert np.max(np.abs(d_fast + d_slow)) < 1e-9
    d = L.d_rho_d_eps(L.LifetimeModel(1.0), sp).matrix
    assert np.max(np.abs(d)) < 1e-9


def test_derivative_nearly_traceless():
    d = L.d_rho_d_eps(L.LifetimeModel(1.05), gauss(0.1))
    assert abs(np.trace(d.matrix)) < 1e-8


def test_step_error_on_roundoff_dominated_step():
    with pytest.raises(L.StepError):
        L.d_rho_d_eps(L.LifetimeModel(1.3), gauss(0.1), L.NumericsConfig(fd_step=1e-10))


# --- purity ---------------------------------------------------------------------

def test_purity_examples():
    assert L.purity_limit(0.0) == 1.0
    assert abs(L.purity_limit(1e-9) - 1.0) < 1e-10
    assert L.purity_limit(0.25) == pytest.approx(0.905, abs=0.005)
    assert L.purity_limit(0.1) >= 0.98
    with pytest.raises(ValueError):
        L.purity_limit(-0.1)


def test_purity_strictly_decreasing():
    values = [L.purity_limit(s) for s in np.linspace(0, 10, 201)]
    assert np.all(np.diff(values) < 0)


# --- eigensystem ----------------------------------------------------------------

def test_eigensystem_identity_half():
    es = L.eigensystem(np.eye(2) / 2)
    assert es.values == pytest.approx([0.5, 0.5])
    assert es.clamped_count == 0


def test_delta_mixture_has_rank_two():
    es = L.eigensystem(L.assemble_rho(L.LifetimeModel(1.5), DELTA))
    assert np.count_nonzero(es.values > 1e-10) == 2
    assert es.values[:2].sum() == pytest.approx(1.0, abs=1e-12)


def test_negativity_error():
    with pytest.raises(L.NegativityError):
        L.eigensystem(np.diag([1.0, -1e-6]))
    es = L.eigensystem(np.diag([1.0, -1e-11, 1e-13]))
    assert es.clamped_count == 2 and np.all(es.values >= 0)


@settings(max_examples=15, deadline=None)
@given(eps=st.floats(0.5, 2.0), sigma=st.sampled_from([0.0, 0.05, 0.25, 1.0]))
def test_eigensystem_invariants(eps, sigma):
    rho = L.assemble_rho(L.LifetimeModel(eps), L.SpectralModel.gaussian(sigma))
    es = L.eigensystem(rho)
    v = es.vectors
    assert np.max(np.abs(v.T @ v - np.eye(rho.dim))) < 1e-10
    assert np.all(es.values >= 0)
    assert np.all(np.diff(es.values) <= 0)
    assert abs(es.values.sum() - np.trace(rho.matrix)) < 1e-10
    assert abs(np.sum(es.values ** 2) - np.sum(rho.matrix ** 2)) < 1e-10


def test_raw_mixture_has_deficit():
    raw = raw_rho(2.0, gauss(1.0), L.NumericsConfig())
    assert 1.0 - np.trace(raw) == pytest.approx(2.5617e-5, rel=1e-3)
