"""Brute-force reference built directly in the time domain.

The dephased single-lifetime kernel

    <t|rho_tau|t'> = H(t) H(t') / tau * exp(-(t + t')/(2 tau)) * exp(-i w0 (t - t'))
                     * exp(-(t - t')**2 sigma**2 / 2)

is sampled on a uniform grid with trapezoid weights, giving a density matrix
whose QFI must agree with the WL-basis pipeline because the QFI is basis
independent.  This is slow (dense ``n_points``-sized eigenproblems) and is
meant for validation, not production sweeps.  The carrier phase is a
diagonal unitary that drops out of every Fisher quantity and is omitted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from .errors import ExtentError, NegativityError
from .model import LifetimeModel, SpectralModel
from .state import HermitianOperator

#: Largest allowed probability mass beyond ``t_max``.
TAIL_TOL = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    t_max: float = 40.0
    n_points: int = 4000

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")

    @property
    def spacing(self) -> float:
        return self.t_max / self.n_points

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points + 1)

    def weights(self) -> np.ndarray:
        w = np.full(self.n_points + 1, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def time_kernel(t, t_prime, tau: float, spectral: SpectralModel):
    """Real part of the dephased kernel of ``rho_tau`` (carrier phase dropped)."""
    t = np.asarray(t, dtype=float)
    t_prime = np.asarray(t_prime, dtype=float)
    inside = (t >= 0) & (t_prime >= 0)
    value = np.exp(-(t + t_prime) / (2.0 * tau)) / tau
    if not spectral.is_delta:
        value = value * np.exp(-0.5 * ((t - t_prime) * spectral.sigma) ** 2)
    return np.where(inside, value, 0.0)


def _raw_grid_rho(epsilon: float, spectral: SpectralModel, grid: TimeGrid) -> np.ndarray:
    t = grid.nodes()
    sw = np.sqrt(grid.weights())
    out = np.zeros((t.size, t.size))
    for tau in (1.0 / epsilon, epsilon):
        f = np.exp(-t / (2.0 * tau)) / math.sqrt(tau) * sw
        out += 0.5 * np.outer(f, f)
    if not spectral.is_delta:
        diff = t[:, None] - t[None, :]
        out *= np.exp(-0.5 * (diff * spectral.sigma) ** 2)
    return out


def _check_extent(epsilon: float, grid: TimeGrid) -> None:
    tail = 0.5 * (math.exp(-grid.t_max * epsilon) + math.exp(-grid.t_max / epsilon))
    if tail > TAIL_TOL:
        raise ExtentError(f"tail mass {tail:.3e} beyond t_max={grid.t_max:g} exceeds "
                          f"{TAIL_TOL:g} at epsilon={epsilon:g}")


def rho_time_grid(model: LifetimeModel, spectral: SpectralModel,
                  grid: TimeGrid = TimeGrid()) -> HermitianOperator:
    """Unit-trace time-grid density matrix with symmetric trapezoid weighting."""
    _check_extent(model.epsilon, grid)
    raw = _raw_grid_rho(model.epsilon, spectral, grid)
    trace = float(np.trace(raw))
    return HermitianOperator(raw / trace, {
        "epsilon": model.epsilon,
        "sigma_tau_bar": spectral.sigma,
        "t_max": grid.t_max,
        "n_points": grid.n_points,
        "discretization_trace_error": trace - 1.0,
    })


def qfi_time_grid(model: LifetimeModel, spectral: SpectralModel,
                  grid: TimeGrid = TimeGrid(), fd_step: float = 1e-5,
                  clamp: float = 1e-12, neg_tol: float = 1e-10) -> float:
    """QFI from the time-grid state.

    Only eigenpairs above ``clamp`` enter explicitly; the contribution of the
    numerically null complement is recovered from ``|| drho |k> ||**2``
    instead of being resolved eigenvector by eigenvector.
    """
    eps = model.epsilon
    _check_extent(eps, grid)
    rho = rho_time_grid(model, spectral, grid).matrix
    h = fd_step * eps
    drho = (_raw_grid_rho(eps + h, spectral, grid) - _raw_grid_rho(eps - h, spectral, grid)) / (2 * h)
    values, vectors = linalg.eigh(rho)
    if values[0] < -neg_tol:
        raise NegativityError(f"time-grid eigenvalue {values[0]:.3e} below -{neg_tol:g}")
    keep = values > clamp
    values, vectors = values[keep], vectors[:, keep]
    dv = drho @ vectors
    inner = vectors.T @ dv
    pair = values[:, None] + values[None, :]
    within = np.sum(2.0 * inner ** 2 / pair)
    leak = np.sum(dv ** 2, axis=0) - np.sum(inner ** 2, axis=0)
    return float(within + np.sum(4.0 * leak / values))


def project_kernel(tau: float, spectral: SpectralModel, n_max: int,
                   t_max: float = 60.0, n_panels: int = 150) -> np.ndarray:
    """Project the single-lifetime time kernel onto WL modes ``0..n_max``.

    Double integral over ``[0, t_max]**2`` with composite 16-point
    Gauss-Legendre in each variable (``tau_bar = 1``).
    """
    tail = math.exp(-t_max / tau)
    if tail > TAIL_TOL:
        raise ExtentError(f"tail mass {tail:.3e} beyond t_max={t_max:g} exceeds {TAIL_TOL:g}")
    x, w = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(0.0, t_max, n_panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    t = (0.5 * (edges[:-1] + edges[1:])[:, None] + half * x).ravel()
    wt = (half * w).ravel()
    modes = np.exp(-0.5 * t) * np.array([special.eval_laguerre(n, t) for n in range(n_max + 1)])
    weighted = modes * wt
    return weighted @ time_kernel(t[:, None], t[None, :], tau, spectral) @ weighted.T


def wl_projection(model: LifetimeModel, spectral: SpectralModel, n_max: int,
                  t_max: float = 60.0, n_panels: int = 150) -> np.ndarray:
    """Un-normalized two-lifetime mixture projected onto WL modes ``0..n_max``."""
    return 0.5 * sum(project_kernel(tau, spectral, n_max, t_max, n_panels)
                     for tau in (model.tau0, model.tau1))
