"""Hong-Ou-Mandel coincidence counting on pairs of lifetime-limited photons.

Two successively emitted photons meet on a 50:50 beam splitter.  Each
photon independently carries lifetime ``tau0`` or ``tau1``; equal-lifetime
pairs are indistinguishable and always bunch, while mixed pairs leave by
different ports with probability ``(1 - overlap**2)/2``.  The coincidence
rate is the only recorded statistic.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .fisher import qfi_max_delta


class Scheme(str, enum.Enum):
    ONE_PHOTON = "OnePhoton"
    TWO_PHOTON = "TwoPhoton"
    TIE = "Tie"


@dataclass(frozen=True)
class LossModel:
    """Collection probability ``p`` and one-photon efficiency ``xi``."""

    p: float
    xi: float

    def __post_init__(self):
        for name in ("p", "xi"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class HomResult:
    epsilon: float
    overlap: float
    coincidence_prob: float
    cfi: float
    info_fraction: float


def _check(epsilon):
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")


def hom_overlap(epsilon: float) -> float:
    """``|<psi_tau0|psi_tau1>| = 2 eps / (1 + eps**2)``."""
    _check(epsilon)
    return 2.0 * epsilon / (1.0 + epsilon * epsilon)


def hom_coincidence_prob(epsilon: float) -> float:
    """Probability that the two photons exit by different ports."""
    _check(epsilon)
    # 1 - g**2 written without cancellation
    e2 = epsilon * epsilon
    return ((1.0 - e2) / (1.0 + e2)) ** 2 / 4.0


def hom_cfi(epsilon: float) -> float:
    """Binomial Fisher information of the coincidence count.

    ``(dP/d eps)**2 / (P (1 - P))``; the removable singularity at
    ``epsilon = 1`` is replaced by its limit, 1.
    """
    _check(epsilon)
    if epsilon == 1.0:
        return 1.0
    e2 = epsilon * epsilon
    g = 2.0 * epsilon / (1.0 + e2)
    dg = 2.0 * (1.0 - e2) / (1.0 + e2) ** 2
    dp = -0.5 * g * dg
    p = hom_coincidence_prob(epsilon)
    return dp * dp / (p * (1.0 - p))


def hom_result(epsilon: float) -> HomResult:
    j = hom_cfi(epsilon)
    return HomResult(epsilon, hom_overlap(epsilon), hom_coincidence_prob(epsilon), j,
                     j / (2.0 * qfi_max_delta(epsilon)))


def scheme_compare(loss: LossModel) -> Scheme:
    """Pick the scheme with more information per excitation pair.

    Only a fraction ``p**2`` of interval pairs hold two photons, so a
    one-photon measurement of efficiency ``xi`` wins when ``xi > p/2``.
    """
    threshold = loss.p / 2.0
    if loss.xi > threshold:
        return Scheme.ONE_PHOTON
    if loss.xi < threshold:
        return Scheme.TWO_PHOTON
    return Scheme.TIE
