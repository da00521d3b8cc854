import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

import lifetime_qfi as L

eps_strategy = st.floats(1e-3, 1e3, allow_nan=False)


def time_nodes(t_max=80.0, panels=80):
    x, w = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(0.0, t_max, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    t = (0.5 * (edges[:-1] + edges[1:])[:, None] + half * x).ravel()
    return t, (half * w).ravel()


def decay_vector(tau, t, w):
    v = np.exp(-t / (2 * tau)) / np.sqrt(tau) * np.sqrt(w)
    return v / np.linalg.norm(v)


def enumerated_coincidence(eps):
    """Average over the four lifetime pairs of the beam-splitter output.

    With a -> (c + d)/sqrt2 and b -> (c - d)/sqrt2, the amplitude for one
    photon in c at time k and one in d at time l is (a_l b_k - a_k b_l)/2.
    """
    t, w = time_nodes()
    modes = [decay_vector(tau, t, w) for tau in (1 / eps, eps)]
    total = 0.0
    for a, b in itertools.product(modes, repeat=2):
        amp = 0.5 * (np.outer(b, a) - np.outer(a, b))
        total += np.sum(amp ** 2)
    return total / 4


def test_overlap_examples():
    assert L.hom_overlap(1.0) == 1.0
    assert L.hom_overlap(2.0) == pytest.approx(0.8, rel=1e-15)


def test_overlap_numerical_time_integral():
    t, w = time_nodes()
    tau0, tau1 = 0.5, 2.0
    integral = np.sum(w * np.exp(-t / (2 * tau0)) * np.exp(-t / (2 * tau1))) / np.sqrt(tau0 * tau1)
    assert L.hom_overlap(2.0) == pytest.approx(integral, rel=1e-12)


@given(eps=eps_strategy)
def test_overlap_inverse_symmetry(eps):
    assert L.hom_overlap(eps) == pytest.approx(L.hom_overlap(1 / eps), rel=1e-14)


def test_coincidence_examples():
    assert L.hom_coincidence_prob(1.0) == 0.0
    assert L.hom_coincidence_prob(1e8) == pytest.approx(0.25, rel=1e-12)


@pytest.mark.parametrize("eps", [1.1, 1.7])
def test_coincidence_against_mode_enumeration(eps):
    assert L.hom_coincidence_prob(eps) == pytest.approx(enumerated_coincidence(eps), rel=1e-10)


@given(eps=eps_strategy)
def test_coincidence_bounds(eps):
    p = L.hom_coincidence_prob(eps)
    assert 0.0 <= p <= 0.25
    assert (p == 0.0) == (eps == 1.0)
    # the reference form loses ~1e-16 absolute to cancellation near eps = 1
    assert p == pytest.approx((1 - L.hom_overlap(eps) ** 2) / 4, rel=1e-9, abs=1e-15)


def test_cfi_limit_and_half_information():
    assert L.hom_cfi(1.0) == 1.0
    r = L.hom_result(1.001)
    assert r.info_fraction == pytest.approx(0.5, rel=0.01)
    one = L.hom_result(1.0)
    assert (one.overlap, one.coincidence_prob, one.cfi, one.info_fraction) == (1.0, 0.0, 1.0, 0.5)


def test_cfi_approach_to_limit():
    for delta in (1e-3, 1e-6):
        eps = 1 + delta
        assert abs(L.hom_cfi(eps) - eps ** -2) <= 2 * delta ** 2
    a, b = L.hom_result(1.001).info_fraction, L.hom_result(1.000001).info_fraction
    assert a == pytest.approx(b, rel=1e-4)


@pytest.mark.xfail(strict=True, reason="J is close to 1/eps**2 near 1, so the two points differ "
                   "by about 2e-3")
def test_cfi_values_agree_near_one():
    assert L.hom_cfi(1.001) == pytest.approx(L.hom_cfi(1.000001), rel=1e-4)


def test_cfi_reparameterization():
    # P(1/e) = P(e) makes J transform with the squared Jacobian e**-2.
    eps = 1.5
    assert L.hom_cfi(1 / eps) == pytest.approx(eps ** 4 * L.hom_cfi(eps), rel=1e-12)
    assert L.hom_result(1 / eps).info_fraction == pytest.approx(
        L.hom_result(eps).info_fraction, rel=1e-9)


@pytest.mark.xfail(strict=True, reason="Fisher information is not invariant under eps -> 1/eps")
def test_cfi_invariant_under_inversion():
    assert L.hom_cfi(1.5) == pytest.approx(L.hom_cfi(1 / 1.5), rel=1e-9)


def test_cfi_matches_finite_difference():
    eps, h = 1.3, 1e-6
    dp = (L.hom_coincidence_prob(eps + h) - L.hom_coincidence_prob(eps - h)) / (2 * h)
    p = L.hom_coincidence_prob(eps)
    assert L.hom_cfi(eps) == pytest.approx(dp ** 2 / (p * (1 - p)), rel=1e-7)


@pytest.mark.parametrize("eps", np.linspace(1.001, 3.0, 25))
def test_cfi_below_two_photon_qfi(eps):
    r = L.hom_result(eps)
    assert r.cfi <= 2 * L.qfi_max_delta(eps)
    assert 0.0 <= r.info_fraction <= 1.0


@pytest.mark.parametrize("p, xi, verdict", [
    (1.0, 0.6, L.Scheme.ONE_PHOTON),
    (1.0, 0.4, L.Scheme.TWO_PHOTON),
    (0.3, 0.1, L.Scheme.TWO_PHOTON),
    (0.5, 0.25, L.Scheme.TIE),
])
def test_scheme_compare(p, xi, verdict):
    assert L.scheme_compare(L.LossModel(p, xi)) is verdict


@given(p=st.floats(0, 1), xi=st.floats(0, 1))
def test_scheme_compare_threshold(p, xi):
    verdict = L.scheme_compare(L.LossModel(p, xi))
    expected = (L.Scheme.ONE_PHOTON if xi > p / 2 else
                L.Scheme.TWO_PHOTON if xi < p / 2 else L.Scheme.TIE)
    assert verdict is expected


@pytest.mark.parametrize("p, xi", [(-0.1, 0.5), (1.2, 0.5), (0.5, 1.5)])
def test_loss_model_validation(p, xi):
    with pytest.raises(ValueError):
        L.LossModel(p, xi)


def test_rejects_nonpositive_epsilon():
    for fn in (L.hom_overlap, L.hom_coincidence_prob, L.hom_cfi):
        with pytest.raises(ValueError):
            fn(0.0)
