"""Parameterization, spectral densities and numerical settings.

All times are measured in units of the geometric-mean lifetime ``tau_bar``
and frequencies in units of ``1/tau_bar``.  The resolution parameter
``epsilon = sqrt(tau1/tau0)`` is dimensionless, so every Fisher information
returned by this package is dimensionless as well: a user-supplied
``tau_bar`` never rescales it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, fields
from typing import Mapping

import numpy as np


@dataclass(frozen=True)
class LifetimeModel:
    """Two-lifetime mixture parameterized by ``(tau_bar, epsilon)``."""

    epsilon: float
    tau_bar: float = 1.0

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon!r}")
        if not (self.tau_bar > 0 and math.isfinite(self.tau_bar)):
            raise ValueError(f"tau_bar must be positive and finite, got {self.tau_bar!r}")

    @property
    def tau0(self) -> float:
        return self.tau_bar / self.epsilon

    @property
    def tau1(self) -> float:
        return self.tau_bar * self.epsilon

    def with_epsilon(self, epsilon: float) -> "LifetimeModel":
        return LifetimeModel(epsilon=epsilon, tau_bar=self.tau_bar)


class SpectralKind(str, enum.Enum):
    DELTA = "delta"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class SpectralModel:
    """Spectral density ``P0`` of the pure-dephasing broadening.

    ``sigma`` is the Gaussian standard deviation in units of ``1/tau_bar``,
    i.e. the product ``sigma * tau_bar``.  ``omega0`` only shifts the carrier
    and drops out of every matrix element; it is kept for bookkeeping.
    """

    kind: SpectralKind = SpectralKind.DELTA
    sigma: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SpectralKind(self.kind))
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma!r}")
        if self.kind is SpectralKind.GAUSSIAN and self.sigma == 0:
            # a zero-width Gaussian is the delta density
            object.__setattr__(self, "kind", SpectralKind.DELTA)

    @classmethod
    def delta(cls, omega0: float = 0.0) -> "SpectralModel":
        return cls(SpectralKind.DELTA, 0.0, omega0)

    @classmethod
    def gaussian(cls, sigma: float, omega0: float = 0.0) -> "SpectralModel":
        return cls(SpectralKind.GAUSSIAN, sigma, omega0)

    @property
    def is_delta(self) -> bool:
        return self.kind is SpectralKind.DELTA

    def density(self, omega):
        """Centered density ``P0(omega)``; only defined for the Gaussian kind."""
        if self.is_delta:
            raise ValueError("the delta density has no pointwise values")
        s = self.sigma
        omega = np.asarray(omega, dtype=float)
        return np.exp(-0.5 * (omega / s) ** 2) / math.sqrt(2.0 * math.pi * s * s)

    def describe(self) -> str:
        return f"kind={self.kind.value} sigma_tau_bar={self.sigma!r} omega0={self.omega0!r}"


@dataclass(frozen=True)
class GammaPair:
    gamma_plus: float
    gamma_minus: float


@dataclass(frozen=True)
class NumericsConfig:
    """Numerical settings shared by the whole pipeline.

    ``quad_nodes`` is the starting node count of the composite Gauss-Legendre
    frequency rule; it is doubled until the WL matrix settles.
    ``quad_window`` is the half-width of the frequency window in units of
    ``1/tau_bar``; ``None`` selects ``9 * sigma``.
    """

    n_max: int = 100
    quad_nodes: int = 1024
    quad_window: float | None = None
    quad_max_doublings: int = 6
    eig_clamp: float = 1e-12
    neg_tol: float = 1e-10
    fd_step: float = 1e-5
    max_trace_deficit: float = 1e-4

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        if int(self.quad_nodes) != self.quad_nodes or self.quad_nodes < 16:
            raise ValueError(f"quad_nodes must be an integer >= 16, got {self.quad_nodes!r}")
        if self.quad_window is not None and not self.quad_window > 0:
            raise ValueError(f"quad_window must be positive, got {self.quad_window!r}")
        if self.quad_max_doublings < 1:
            raise ValueError("quad_max_doublings must be >= 1")
        if not self.eig_clamp > 0:
            raise ValueError(f"eig_clamp must be positive, got {self.eig_clamp!r}")
        if not self.neg_tol >= self.eig_clamp:
            raise ValueError("neg_tol must be >= eig_clamp")
        if not 0 < self.fd_step < 1e-2:
            raise ValueError(f"fd_step must lie in (0, 1e-2), got {self.fd_step!r}")
        if not self.max_trace_deficit > 0:
            raise ValueError("max_trace_deficit must be positive")
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "quad_nodes", int(self.quad_nodes))

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def replace(self, **changes) -> "NumericsConfig":
        data = asdict(self)
        data.update(changes)
        return NumericsConfig(**data)

    def to_kv(self) -> str:
        """Serialize as ``key = value`` lines."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {'none' if value is None else repr(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kv(cls, text: str) -> "NumericsConfig":
        """Parse the ``key = value`` format written by :meth:`to_kv`.

        Blank lines and ``#`` comments are ignored; unknown keys raise.
        """
        known = {f.name: f for f in fields(cls)}
        values: dict[str, object] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in known:
                raise ValueError(f"line {lineno}: unknown numerics key {key!r}")
            values[key] = _parse_value(key, value)
        return cls(**values)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "NumericsConfig":
        return cls(**dict(mapping))


_INT_KEYS = {"n_max", "quad_nodes", "quad_max_doublings"}


def _parse_value(key: str, value: str):
    if value.lower() == "none":
        return None
    if key in _INT_KEYS:
        return int(value)
    return float(value)


def lifetimes_from(model: LifetimeModel) -> tuple[float, float]:
    """Return ``(tau0, tau1) = (tau_bar/epsilon, tau_bar*epsilon)``."""
    return model.tau0, model.tau1


def gamma_pair(tau: float, tau_bar: float = 1.0) -> GammaPair:
    """Decay-rate combinations ``1/tau +- 1/tau_bar``."""
    if not (tau > 0 and tau_bar > 0):
        raise ValueError(f"tau and tau_bar must be positive, got {tau!r}, {tau_bar!r}")
    return GammaPair(1.0 / tau + 1.0 / tau_bar, 1.0 / tau - 1.0 / tau_bar)
