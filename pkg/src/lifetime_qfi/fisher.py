"""Quantum and classical Fisher information for the resolution parameter.

``qfi`` evaluates ``Tr(L**2 rho)`` through the symmetric logarithmic
derivative ``L`` built in the eigenbasis of ``rho``.  The classical
quantities cover three measurements: arrival-time histogramming (TCSPC),
projection onto WL modes, and projection onto eigenstates of ``L``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import mpmath
import numpy as np
from scipy import integrate

from .model import LifetimeModel, NumericsConfig, SpectralModel
from .state import (EigenSystem, HermitianOperator, assemble_rho, d_rho_d_eps, eigensystem,
                    state_rule)

#: Outcomes with probability below this carry no information at double precision.
P_FLOOR = 1e-14
#: Offsets ``10**-k`` used to approach ``epsilon = 1`` from above.
LIMIT_EXPONENTS = (2, 3, 4)


@dataclass(frozen=True)
class SldOperator:
    matrix: np.ndarray
    support_dim: int


class CurveKind(str, enum.Enum):
    QFI = "qfi"
    CFI_TCSPC = "cfi_tcspc"
    CFI_WL = "cfi_wl"
    CFI_SLD = "cfi_sld"
    QFI_MAX = "qfi_max"


@dataclass(frozen=True)
class FisherCurve:
    kind: CurveKind
    samples: tuple
    settings: dict = field(default_factory=dict)

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([e for e, _ in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples])


class ModeCfi(NamedTuple):
    total: float
    per_mode: np.ndarray


def _as_matrix(op):
    return op.matrix if isinstance(op, HermitianOperator) else np.asarray(op, dtype=float)


def _pair_terms(rho_eigen: EigenSystem, drho, clamp: float):
    d = _as_matrix(drho)
    if d.shape != rho_eigen.vectors.shape:
        raise ValueError(f"shape mismatch: rho is {rho_eigen.vectors.shape}, drho is {d.shape}")
    V = rho_eigen.vectors
    dk = V.T @ d @ V
    denom = rho_eigen.values[:, None] + rho_eigen.values[None, :]
    keep = denom > clamp
    return dk, denom, keep


def sld(rho_eigen: EigenSystem, drho, clamp: float = 1e-12) -> SldOperator:
    """Symmetric logarithmic derivative of ``rho`` in the original basis.

    Pairs of eigenvalues with ``D_k + D_k' <= clamp`` are left out.
    """
    dk, denom, keep = _pair_terms(rho_eigen, drho, clamp)
    lk = np.zeros_like(dk)
    lk[keep] = 2.0 * dk[keep] / denom[keep]
    V = rho_eigen.vectors
    L = V @ lk @ V.T
    return SldOperator(0.5 * (L + L.T), int(np.count_nonzero(keep)))


def qfi(rho_eigen: EigenSystem, drho, clamp: float = 1e-12) -> float:
    """``sum_{k,k'} 2 |<k|drho|k'>|**2 / (D_k + D_k')`` over retained pairs."""
    dk, denom, keep = _pair_terms(rho_eigen, drho, clamp)
    return float(np.sum(2.0 * dk[keep] ** 2 / denom[keep]))


def _qfi_point(epsilon: float, spectral: SpectralModel, numerics: NumericsConfig) -> float:
    rho, drho = _state(epsilon, spectral, numerics)
    eig = eigensystem(rho, numerics.eig_clamp, numerics.neg_tol)
    return qfi(eig, drho, numerics.eig_clamp)


def qfi_at(epsilon: float, spectral: SpectralModel,
           numerics: NumericsConfig = NumericsConfig()) -> float:
    """QFI of the dephased mixture at ``epsilon``.

    At exactly ``epsilon == 1`` the support of ``rho`` collapses, so the value
    returned is the one at ``1 + 10**-4``, the end of the approach grid
    ``1 + 10**-k`` (see :func:`qfi_limit_at_one`).
    """
    if epsilon == 1.0:
        return qfi_limit_at_one(spectral, numerics)[-1]
    return _qfi_point(epsilon, spectral, numerics)


def qfi_limit_at_one(spectral: SpectralModel, numerics: NumericsConfig = NumericsConfig(),
                     exponents: Sequence[int] = LIMIT_EXPONENTS) -> list[float]:
    """QFI along ``epsilon = 1 + 10**-k`` for each ``k`` in ``exponents``."""
    return [_qfi_point(1.0 + 10.0 ** -k, spectral, numerics) for k in exponents]


# ---------------------------------------------------------------------------
# lifetime-limited upper bound

def _span_qfi(eps: mpmath.mpf) -> mpmath.mpf:
    # Frame {a, b, da, db}: the two pure decays psi_tau and their epsilon
    # derivatives.  Every inner product is a moment int t**k exp(-lam t).
    taus = (1 / eps, eps)
    dtaus = (-1 / eps ** 2, mpmath.mpf(1))

    def poly(i, deriv):
        if not deriv:
            return (mpmath.mpf(1), mpmath.mpf(0))
        t = taus[i]
        return (dtaus[i] * (-1 / (2 * t)), dtaus[i] / (2 * t * t))

    frame = [(0, False), (1, False), (0, True), (1, True)]
    G = mpmath.matrix(4, 4)
    for r, (i, di) in enumerate(frame):
        for c, (j, dj) in enumerate(frame):
            lam = (1 / taus[i] + 1 / taus[j]) / 2
            pa, pb = poly(i, di), poly(j, dj)
            moments = (1 / lam, 1 / lam ** 2, 2 / lam ** 3)
            G[r, c] = (pa[0] * pb[0] * moments[0]
                       + (pa[0] * pb[1] + pa[1] * pb[0]) * moments[1]
                       + pa[1] * pb[1] * moments[2]) / mpmath.sqrt(taus[i] * taus[j])
    g = G[0, 1]
    # eigenvectors of rho inside the span, expressed in the frame
    U = [mpmath.matrix([1, 1, 0, 0]) / mpmath.sqrt(2 * (1 + g)),
         mpmath.matrix([1, -1, 0, 0]) / mpmath.sqrt(2 * (1 - g))]
    D = [(1 + g) / 2, (1 - g) / 2]

    def apply_drho(x):
        gx = G * x
        return mpmath.matrix([gx[2], gx[3], gx[0], gx[1]]) / 2

    DU = [apply_drho(u) for u in U]

    def ip(x, y):
        return (x.T * G * y)[0]

    M = [[ip(U[k], DU[l]) for l in range(2)] for k in range(2)]
    total = mpmath.mpf(0)
    for k in range(2):
        for l in range(2):
            total += 2 * M[k][l] ** 2 / (D[k] + D[l])
        outside = ip(DU[k], DU[k]) - M[0][k] ** 2 - M[1][k] ** 2
        total += 4 * outside / D[k]
    return total


def qfi_max_delta(epsilon: float) -> float:
    """QFI of the lifetime-limited (undephased) mixture.

    The state has rank two, so the computation is done exactly in the span of
    the two decays and their derivatives, in 60-digit arithmetic to survive
    the near-degeneracy close to ``epsilon = 1``.  At ``epsilon == 1`` the
    limiting value 1 is returned.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if epsilon == 1.0:
        return 1.0
    with mpmath.workdps(60):
        return float(_span_qfi(mpmath.mpf(epsilon)))


# ---------------------------------------------------------------------------
# classical Fisher information

def tcspc_density(t, epsilon: float):
    """Arrival-time density of the equal two-lifetime mixture (``tau_bar = 1``)."""
    t = np.asarray(t, dtype=float)
    return 0.5 * (epsilon * np.exp(-epsilon * t) + np.exp(-t / epsilon) / epsilon)


def tcspc_density_derivative(t, epsilon: float):
    t = np.asarray(t, dtype=float)
    e = epsilon
    return 0.5 * ((1.0 - e * t) * np.exp(-e * t) + (t / e ** 3 - 1.0 / e ** 2) * np.exp(-t / e))


def cfi_tcspc(epsilon: float) -> float:
    """Fisher information of the photon arrival-time distribution.

    Independent of the dephasing: the time-domain diagonal of the state does
    not involve ``sigma``.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if epsilon == 1.0:
        return 0.0

    def integrand(t):
        fast, slow = math.exp(-epsilon * t), math.exp(-t / epsilon)
        p = 0.5 * (epsilon * fast + slow / epsilon)
        dp = 0.5 * ((1.0 - epsilon * t) * fast + (t / epsilon ** 3 - 1.0 / epsilon ** 2) * slow)
        return dp * dp / p if p > 0 else 0.0

    upper = 50.0 * max(epsilon, 1.0 / epsilon)
    val, _ = integrate.quad(integrand, 0.0, upper, epsabs=0.0, epsrel=1e-12, limit=500)
    return float(val)


def _cfi(p: np.ndarray, dp: np.ndarray) -> np.ndarray:
    contrib = np.zeros_like(p)
    keep = p > P_FLOOR
    contrib[keep] = dp[keep] ** 2 / p[keep]
    return contrib


def cfi_wl(model: LifetimeModel, spectral: SpectralModel,
           numerics: NumericsConfig = NumericsConfig()) -> ModeCfi:
    """CFI of projecting onto WL modes ``0..n_max``, with per-mode contributions."""
    rho, drho = _state(model.epsilon, spectral, numerics)
    contrib = _cfi(np.diag(rho.matrix).copy(), np.diag(drho.matrix).copy())
    return ModeCfi(float(contrib.sum()), contrib)


def _eigen_projector_groups(values: np.ndarray, rel_tol: float = 1e-8) -> list[np.ndarray]:
    # Degenerate eigenvalues of L share one projector.
    order = np.argsort(values)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    groups, current = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if values[b] - values[a] > rel_tol * scale:
            groups.append(np.array(current))
            current = []
        current.append(b)
    groups.append(np.array(current))
    return groups


def limit_point(epsilon: float) -> float:
    """Evaluation point standing in for ``epsilon``; ``1`` maps to ``1 + 10**-4``."""
    return 1.0 + 10.0 ** -LIMIT_EXPONENTS[-1] if epsilon == 1.0 else epsilon


def _state(epsilon, spectral, numerics):
    model = LifetimeModel(epsilon)
    rule = state_rule(model, spectral, numerics)
    return (assemble_rho(model, spectral, numerics, rule),
            d_rho_d_eps(model, spectral, numerics, rule))


@dataclass(frozen=True)
class SldMeasurement:
    """Projective measurement onto the eigenspaces of the SLD at ``design_eps``."""

    design_eps: float
    vectors: np.ndarray
    groups: tuple

    def probabilities(self, rho, drho) -> tuple[np.ndarray, np.ndarray]:
        v = self.vectors
        p_vec = np.einsum("ij,ik,kj->j", v, _as_matrix(rho), v)
        dp_vec = np.einsum("ij,ik,kj->j", v, _as_matrix(drho), v)
        return (np.array([p_vec[g].sum() for g in self.groups]),
                np.array([dp_vec[g].sum() for g in self.groups]))

    def cfi(self, eval_eps: float, spectral: SpectralModel,
            numerics: NumericsConfig = NumericsConfig()) -> float:
        rho, drho = _state(eval_eps, spectral, numerics)
        return float(_cfi(*self.probabilities(rho, drho)).sum())


def sld_measurement(design_eps: float, spectral: SpectralModel,
                    numerics: NumericsConfig = NumericsConfig()) -> SldMeasurement:
    """Diagonalize the SLD at ``design_eps``; degenerate eigenvalues share a projector."""
    if not design_eps > 0:
        raise ValueError(f"design_eps must be positive, got {design_eps!r}")
    rho, drho = _state(design_eps, spectral, numerics)
    L = sld(eigensystem(rho, numerics.eig_clamp, numerics.neg_tol), drho, numerics.eig_clamp)
    lam, vecs = np.linalg.eigh(L.matrix)
    return SldMeasurement(design_eps, vecs, tuple(_eigen_projector_groups(lam)))


def cfi_sld_eigenbasis(design_eps: float, eval_eps: float, spectral: SpectralModel,
                       numerics: NumericsConfig = NumericsConfig()) -> float:
    """CFI at ``eval_eps`` of the projective measurement onto eigenstates of ``L(design_eps)``."""
    if not eval_eps > 0:
        raise ValueError(f"eval_eps must be positive, got {eval_eps!r}")
    return sld_measurement(design_eps, spectral, numerics).cfi(eval_eps, spectral, numerics)


class FisherPoint(NamedTuple):
    epsilon: float
    qfi: float
    cfi_wl: float
    cfi_wl_per_mode: np.ndarray


def fisher_point(epsilon: float, spectral: SpectralModel,
                 numerics: NumericsConfig = NumericsConfig()) -> FisherPoint:
    """QFI and WL-projection CFI from one assembly of the state.

    ``epsilon == 1`` is evaluated at :func:`limit_point`.
    """
    eps = limit_point(epsilon)
    rho, drho = _state(eps, spectral, numerics)
    eig = eigensystem(rho, numerics.eig_clamp, numerics.neg_tol)
    contrib = _cfi(np.diag(rho.matrix).copy(), np.diag(drho.matrix).copy())
    return FisherPoint(eps, qfi(eig, drho, numerics.eig_clamp), float(contrib.sum()), contrib)


# ---------------------------------------------------------------------------
# curves

def fisher_curve(kind: CurveKind | str, epsilons: Sequence[float], spectral: SpectralModel,
                 numerics: NumericsConfig = NumericsConfig(),
                 design_eps: float | None = None) -> FisherCurve:
    """Sample one Fisher-information curve on an epsilon grid, in grid order."""
    kind = CurveKind(kind)
    if kind is CurveKind.CFI_SLD and design_eps is None:
        raise ValueError("an SLD-eigenbasis curve needs design_eps")
    samples = []
    for eps in epsilons:
        eps = float(eps)
        if kind is CurveKind.QFI:
            value = qfi_at(eps, spectral, numerics)
        elif kind is CurveKind.QFI_MAX:
            value = qfi_max_delta(eps)
        elif kind is CurveKind.CFI_TCSPC:
            value = cfi_tcspc(eps)
        elif kind is CurveKind.CFI_WL:
            value = cfi_wl(LifetimeModel(eps), spectral, numerics).total
        else:
            value = cfi_sld_eigenbasis(design_eps, eps, spectral, numerics)
        samples.append((eps, value))
    settings = {"spectral": spectral.describe(), "numerics": numerics.to_kv()}
    if design_eps is not None:
        settings["design_eps"] = design_eps
    return FisherCurve(kind, tuple(samples), settings)
