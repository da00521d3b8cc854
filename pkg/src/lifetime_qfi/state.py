"""Assembly of the two-lifetime mixed state and its epsilon-derivative.

The collected photon is the equal mixture ``(rho_tau0 + rho_tau1)/2`` of two
dephased single-lifetime states, expressed in the WL basis at the geometric
mean lifetime.  Everything here works in units of ``tau_bar``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from . import __version__
from .errors import NegativityError, StepError, TruncationError
from .model import LifetimeModel, NumericsConfig, SpectralModel
from .wl_matrix import FrequencyRule, converged_rule, delta_matrix, matrix_on_rule

#: Max entry change (relative to the largest entry) allowed when halving the step.
STEP_TOL = 1e-6


@dataclass(frozen=True)
class HermitianOperator:
    """Dense real-symmetric operator in the WL basis with provenance."""

    matrix: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace_deficit(self) -> float:
        return float(self.provenance.get("trace_deficit", 0.0))

    def save(self, path) -> None:
        """Write as text: ``#``-prefixed JSON provenance header, then rows."""
        path = Path(path)
        header = json.dumps(self.provenance, sort_keys=True)
        try:
            np.savetxt(path, self.matrix, fmt="%.17g", header=header, comments="# ")
        except OSError as exc:
            raise OSError(f"cannot write operator to {path}: {exc}") from exc

    @classmethod
    def load(cls, path) -> "HermitianOperator":
        path = Path(path)
        with open(path) as fh:
            first = fh.readline()
        provenance = json.loads(first[1:]) if first.startswith("#") else {}
        matrix = np.loadtxt(path, comments="#", ndmin=2)
        return cls(matrix, provenance)


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    vectors: np.ndarray
    clamped_count: int

    @property
    def support(self) -> np.ndarray:
        return self.values > 0


def _provenance(model: LifetimeModel, spectral: SpectralModel, numerics: NumericsConfig,
                rule: FrequencyRule | None, **extra) -> dict:
    prov = {
        "version": __version__,
        "epsilon": model.epsilon,
        "tau_bar": model.tau_bar,
        "spectral_kind": spectral.kind.value,
        "sigma_tau_bar": spectral.sigma,
        "omega0": spectral.omega0,
        "n_max": numerics.n_max,
    }
    if rule is not None:
        prov.update(quad_nodes=rule.n_nodes, quad_window=rule.window,
                    quad_doubling_change=rule.doubling_change)
    prov.update(extra)
    return prov


def state_rule(model: LifetimeModel, spectral: SpectralModel,
               numerics: NumericsConfig) -> FrequencyRule | None:
    """Frequency rule converged for both lifetimes (``None`` for the delta density)."""
    if spectral.is_delta:
        return None
    return converged_rule([1.0 / model.epsilon, model.epsilon], spectral, numerics)


def raw_rho(epsilon: float, spectral: SpectralModel, numerics: NumericsConfig,
            rule: FrequencyRule | None = None) -> np.ndarray:
    """Un-normalized truncated mixture at ``epsilon`` (units of ``tau_bar``)."""
    if rule is None and not spectral.is_delta:
        rule = converged_rule([1.0 / epsilon, epsilon], spectral, numerics)
    mats = _lifetime_matrices(epsilon, spectral, numerics, rule)
    return 0.5 * (mats[0] + mats[1])


def assemble_rho(model: LifetimeModel, spectral: SpectralModel,
                 numerics: NumericsConfig = NumericsConfig(),
                 rule: FrequencyRule | None = None) -> HermitianOperator:
    """Truncated, unit-trace WL matrix of the two-lifetime mixture.

    The trace deficit ``1 - Tr`` of the truncated matrix is stored in the
    provenance before renormalizing.  Raises :class:`TruncationError` when it
    exceeds ``numerics.max_trace_deficit``.
    """
    if rule is None:
        rule = state_rule(model, spectral, numerics)
    rho = raw_rho(model.epsilon, spectral, numerics, rule)
    deficit = 1.0 - float(np.trace(rho))
    if deficit > numerics.max_trace_deficit:
        raise TruncationError(
            f"trace deficit {deficit:.3e} exceeds {numerics.max_trace_deficit:g} at "
            f"epsilon={model.epsilon:g}, sigma_tau_bar={spectral.sigma:g}; increase n_max "
            f"(currently {numerics.n_max})")
    rho = rho / (1.0 - deficit)
    return HermitianOperator(rho, _provenance(model, spectral, numerics, rule,
                                              trace_deficit=deficit))


def _lifetime_matrices(epsilon, spectral, numerics, rule):
    taus = (1.0 / epsilon, epsilon)
    if spectral.is_delta:
        return [delta_matrix(t, numerics.n_max) for t in taus]
    return [matrix_on_rule(t, numerics.n_max, rule) for t in taus]


def lifetime_derivatives(epsilon: float, h: float, spectral: SpectralModel,
                         numerics: NumericsConfig, rule: FrequencyRule | None = None):
    """Central differences of ``M(1/epsilon)`` and ``M(epsilon)`` with step ``h``."""
    if rule is None and not spectral.is_delta:
        rule = converged_rule([1.0 / epsilon, epsilon], spectral, numerics)
    up = _lifetime_matrices(epsilon + h, spectral, numerics, rule)
    down = _lifetime_matrices(epsilon - h, spectral, numerics, rule)
    return tuple((a - b) / (2.0 * h) for a, b in zip(up, down))


def d_rho_d_eps(model: LifetimeModel, spectral: SpectralModel,
                numerics: NumericsConfig = NumericsConfig(),
                rule: FrequencyRule | None = None) -> HermitianOperator:
    """Central-difference ``d rho / d epsilon`` of the un-normalized mixture.

    The step is ``h = fd_step * epsilon``.  The derivative is recomputed with
    ``h/2``; if any entry moves by more than 1e-6 of the largest entry of the
    two single-lifetime terms a :class:`StepError` is raised.  (The mixture
    derivative itself vanishes at ``epsilon = 1``, so it cannot set the
    scale.)  Both differences reuse one frequency rule so the quadrature error
    cancels smoothly.
    """
    eps = model.epsilon
    if rule is None:
        rule = state_rule(model, spectral, numerics)
    h = numerics.fd_step * eps
    terms = lifetime_derivatives(eps, h, spectral, numerics, rule)
    half_terms = lifetime_derivatives(eps, 0.5 * h, spectral, numerics, rule)
    d = 0.5 * (terms[0] + terms[1])
    d_half = 0.5 * (half_terms[0] + half_terms[1])
    scale = 0.5 * max(float(np.max(np.abs(t))) for t in terms)
    change = float(np.max(np.abs(d - d_half)))
    if scale > 0 and change > STEP_TOL * scale:
        raise StepError(
            f"halving the step changes d rho/d epsilon by {change / scale:.3e} (relative) "
            f"at epsilon={eps:g}; adjust fd_step={numerics.fd_step:g}")
    d = 0.5 * (d + d.T)
    return HermitianOperator(d, _provenance(model, spectral, numerics, rule, fd_step=h,
                                            step_change=change / scale if scale else 0.0))


def state_and_derivative(model: LifetimeModel, spectral: SpectralModel,
                         numerics: NumericsConfig = NumericsConfig()):
    """``(rho, d rho/d epsilon)`` sharing one frequency rule."""
    rule = state_rule(model, spectral, numerics)
    return (assemble_rho(model, spectral, numerics, rule),
            d_rho_d_eps(model, spectral, numerics, rule))


def purity_limit(sigma_tau_bar: float) -> float:
    """Purity ``Tr(rho^2)`` of the dephased state in the ``epsilon -> 1`` limit.

    Evaluates ``(4 pi)**-1/2 int exp(-W**2/4) / (1 + (s W)**2) dW`` with
    ``s = sigma * tau_bar``.
    """
    s = float(sigma_tau_bar)
    if not s >= 0:
        raise ValueError(f"sigma_tau_bar must be >= 0, got {sigma_tau_bar!r}")
    if s == 0:
        return 1.0

    def integrand(w):
        return math.exp(-0.25 * w * w) / (1.0 + (s * w) ** 2)

    # even integrand; the Gaussian is below 1e-17 beyond |W| = 13
    val, _ = integrate.quad(integrand, 0.0, 13.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 2.0 * val / math.sqrt(4.0 * math.pi)


def eigensystem(op: HermitianOperator | np.ndarray, clamp: float = 1e-12,
                neg_tol: float = 1e-10) -> EigenSystem:
    """Symmetric eigendecomposition, eigenvalues descending.

    Eigenvalues in ``[-neg_tol, clamp]`` are floored to zero; anything below
    ``-neg_tol`` raises :class:`NegativityError`.
    """
    matrix = op.matrix if isinstance(op, HermitianOperator) else np.asarray(op, dtype=float)
    values, vectors = np.linalg.eigh(matrix)
    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]
    if values.size and values[-1] < -neg_tol:
        raise NegativityError(f"eigenvalue {values[-1]:.3e} below -{neg_tol:g}")
    small = values <= clamp
    values = np.where(small, 0.0, values)
    return EigenSystem(values, vectors, int(np.count_nonzero(small)))
