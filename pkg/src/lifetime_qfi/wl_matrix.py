"""Matrix elements of the dephased single-lifetime state in the WL basis.

The weighted-Laguerre (WL) modes at the mean lifetime are

    phi_n(t) = H(t) exp(-t / 2 tau_bar) L_n(t / tau_bar) / sqrt(tau_bar)

and the overlap of a monochromatic single-lifetime photon (detuning ``omega``
from the basis carrier) with mode ``n`` is

    c_n(omega) = b(omega)**n / (s(omega) sqrt(tau tau_bar)),
    s = Gamma_+/2 + i omega,   b = (Gamma_-/2 + i omega) / s,

so that ``<phi_n|rho_tau|phi_m> = int P0(omega) c_n conj(c_m) d omega``.
Since ``|Gamma_-| < Gamma_+`` the base ``b`` has modulus below one on the
real axis; powers are built by repeated multiplication.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .errors import ConvergenceError
from .model import NumericsConfig, SpectralModel, gamma_pair

logger = logging.getLogger(__name__)

#: Gauss-Legendre nodes per panel of the composite frequency rule.
PANEL_ORDER = 16
#: Gaussian half-window in units of sigma; the neglected mass is ~2e-19.
WINDOW_SIGMAS = 9.0
#: Node doubling stops once the matrix moves by less than this (absolute).
CONVERGED_TOL = 1e-10
#: Doubling that still moves the matrix by more than this is a failure.
FAIL_TOL = 1e-8
#: Bound on the imaginary residue of a computed element.
IMAG_TOL = 1e-12

_CHUNK = 4096


@dataclass(frozen=True)
class WlElementRequest:
    n: int
    m: int
    tau: float
    model: SpectralModel
    numerics: NumericsConfig = NumericsConfig()
    tau_bar: float = 1.0

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("basis indices must be non-negative")
        if max(self.n, self.m) > self.numerics.n_max:
            raise ValueError("basis index beyond the truncation order n_max")
        if not self.tau > 0:
            raise ValueError("tau must be positive")


@dataclass(frozen=True)
class FrequencyRule:
    """Quadrature nodes with the spectral density folded into the weights."""

    omega: np.ndarray
    weights: np.ndarray
    window: float
    doubling_change: float

    @property
    def n_nodes(self) -> int:
        return self.omega.size


def _check_positive(tau, tau_bar):
    if not (tau > 0 and tau_bar > 0):
        raise ValueError(f"tau and tau_bar must be positive, got {tau!r}, {tau_bar!r}")


def wl_pure_coefficient(n, tau: float, tau_bar: float = 1.0):
    """Overlap ``<phi_n|psi_tau>`` of a lifetime-limited photon with WL mode ``n``.

    Uses the sign convention ``c_n = 2 sqrt(tau tau_bar)/(tau + tau_bar) * r**n``
    with ``r = (tau_bar - tau)/(tau_bar + tau)``.  ``n`` may be an integer array.
    """
    _check_positive(tau, tau_bar)
    r = (tau_bar - tau) / (tau_bar + tau)
    amp = 2.0 * math.sqrt(tau * tau_bar) / (tau + tau_bar)
    n = np.asarray(n)
    out = amp * np.power(r, n, dtype=float)
    return float(out) if out.ndim == 0 else out


def wl_element_delta(n: int, m: int, tau: float, tau_bar: float = 1.0) -> float:
    """Lifetime-limited element ``4 tau tau_bar/(tau + tau_bar)**2 * r**(n+m)``."""
    _check_positive(tau, tau_bar)
    if n < 0 or m < 0:
        raise ValueError("basis indices must be non-negative")
    r = (tau_bar - tau) / (tau_bar + tau)
    return 4.0 * tau * tau_bar / (tau + tau_bar) ** 2 * r ** (n + m)


def wl_coefficient_table(tau: float, n_max: int, omega, tau_bar: float = 1.0) -> np.ndarray:
    """Complex table ``C[n, k] = c_n(omega_k)`` for ``n = 0..n_max``."""
    _check_positive(tau, tau_bar)
    g = gamma_pair(tau, tau_bar)
    omega = np.asarray(omega, dtype=float)
    s = 0.5 * g.gamma_plus + 1j * omega
    base = (0.5 * g.gamma_minus + 1j * omega) / s
    table = np.empty((n_max + 1, omega.size), dtype=complex)
    table[0] = 1.0 / (s * math.sqrt(tau * tau_bar))
    for n in range(1, n_max + 1):
        table[n] = table[n - 1] * base
    return table


def delta_matrix(tau: float, n_max: int, tau_bar: float = 1.0) -> np.ndarray:
    """Rank-one WL matrix of a lifetime-limited photon."""
    c = wl_pure_coefficient(np.arange(n_max + 1), tau, tau_bar)
    return np.outer(c, c)


def gauss_legendre_rule(spectral: SpectralModel, n_nodes: int,
                        window: float | None = None) -> FrequencyRule:
    """Composite Gauss-Legendre rule on ``[-W, W]`` weighted by ``P0``."""
    if spectral.is_delta:
        raise ValueError("no frequency rule for the delta density")
    if window is None:
        window = WINDOW_SIGMAS * spectral.sigma
    n_panels = max(1, -(-n_nodes // PANEL_ORDER))
    x, w = leggauss(PANEL_ORDER)
    edges = np.linspace(-window, window, n_panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    omega = (mid + half * x).ravel()
    weights = (half * w).ravel() * spectral.density(omega)
    return FrequencyRule(omega, weights, float(window), math.nan)


def matrix_on_rule(tau: float, n_max: int, rule: FrequencyRule,
                   tau_bar: float = 1.0) -> np.ndarray:
    """Real symmetric WL matrix of ``rho_tau`` integrated with ``rule``."""
    acc = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for start in range(0, rule.n_nodes, _CHUNK):
        sl = slice(start, start + _CHUNK)
        table = wl_coefficient_table(tau, n_max, rule.omega[sl], tau_bar)
        acc += (table * rule.weights[sl]) @ table.conj().T
    residue = np.max(np.abs(acc.imag)) if acc.size else 0.0
    if residue > IMAG_TOL:
        raise ConvergenceError(
            f"imaginary residue {residue:.3e} exceeds {IMAG_TOL:g}; frequency rule is asymmetric")
    out = acc.real
    return 0.5 * (out + out.T)


def converged_rule(taus, spectral: SpectralModel, numerics: NumericsConfig,
                   tau_bar: float = 1.0, n_max: int | None = None) -> FrequencyRule:
    """Smallest doubled Gauss-Legendre rule that settles every ``tau`` matrix.

    Starting at ``numerics.quad_nodes``, the node count is doubled until the
    WL matrices of all ``taus`` move by at most 1e-10 (max abs entry).  If the
    doubling budget runs out with a change above 1e-8, :class:`ConvergenceError`
    is raised; changes between the two bounds are accepted with a warning.
    """
    n_max = numerics.n_max if n_max is None else n_max
    n_nodes = numerics.quad_nodes
    rule = gauss_legendre_rule(spectral, n_nodes, numerics.quad_window)
    mats = [matrix_on_rule(t, n_max, rule, tau_bar) for t in taus]
    change = math.inf
    for _ in range(numerics.quad_max_doublings):
        n_nodes *= 2
        finer = gauss_legendre_rule(spectral, n_nodes, numerics.quad_window)
        finer_mats = [matrix_on_rule(t, n_max, finer, tau_bar) for t in taus]
        change = max(float(np.max(np.abs(a - b))) for a, b in zip(mats, finer_mats))
        rule, mats = finer, finer_mats
        if change <= CONVERGED_TOL:
            break
    else:
        if change > FAIL_TOL:
            raise ConvergenceError(
                f"frequency quadrature unsettled after {numerics.quad_max_doublings} doublings "
                f"({rule.n_nodes} nodes): change {change:.3e} > {FAIL_TOL:g}")
        logger.warning("frequency quadrature change %.3e above %.0e at %d nodes",
                       change, CONVERGED_TOL, rule.n_nodes)
    return FrequencyRule(rule.omega, rule.weights, rule.window, change)


def wl_matrix(tau: float, spectral: SpectralModel, numerics: NumericsConfig = NumericsConfig(),
              tau_bar: float = 1.0, rule: FrequencyRule | None = None) -> np.ndarray:
    """WL matrix of the dephased single-lifetime state, truncated at ``n_max``."""
    if spectral.is_delta:
        return delta_matrix(tau, numerics.n_max, tau_bar)
    if rule is None:
        rule = converged_rule([tau], spectral, numerics, tau_bar)
    return matrix_on_rule(tau, numerics.n_max, rule, tau_bar)


def wl_element_gaussian(req: WlElementRequest) -> float:
    """Single element ``<phi_n|rho_tau|phi_m>`` under Gaussian broadening."""
    if req.model.is_delta:
        return wl_element_delta(req.n, req.m, req.tau, req.tau_bar)
    top = max(req.n, req.m)
    rule = converged_rule([req.tau], req.model, req.numerics, req.tau_bar, n_max=top)
    table = wl_coefficient_table(req.tau, top, rule.omega, req.tau_bar)
    value = np.sum(rule.weights * table[req.n] * table[req.m].conj())
    if abs(value.imag) > IMAG_TOL:
        raise ConvergenceError(f"imaginary residue {abs(value.imag):.3e} exceeds {IMAG_TOL:g}")
    return float(value.real)


def trace_deficit_exact(tau: float, spectral: SpectralModel, n_max: int,
                        tau_bar: float = 1.0) -> float:
    """Weight of ``rho_tau`` outside modes ``0..n_max``.

    Mode populations at fixed detuning form a geometric series with ratio
    ``|b(omega)|**2``, so the tail is ``int P0 |b|**(2 n_max + 2)``.
    """
    g = gamma_pair(tau, tau_bar)
    if spectral.is_delta:
        return abs(g.gamma_minus / g.gamma_plus) ** (2 * n_max + 2)
    def integrand(w):
        q2 = (0.25 * g.gamma_minus ** 2 + w * w) / (0.25 * g.gamma_plus ** 2 + w * w)
        return spectral.density(w) * q2 ** (n_max + 1)

    s = spectral.sigma
    val, _ = integrate.quad(integrand, -12 * s, 12 * s, points=[0.0], limit=400,
                            epsabs=1e-15, epsrel=1e-10)
    return float(val)
