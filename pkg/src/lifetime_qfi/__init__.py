"""Fisher-information bounds for resolving two spontaneous-emission lifetimes
from single photons broadened by pure dephasing."""

__version__ = "0.1.0"

from .errors import (ConvergenceError, ExtentError, NegativityError, NumericsError,  # noqa: E402
                     StepError, TruncationError)
from .model import (GammaPair, LifetimeModel, NumericsConfig, SpectralKind,  # noqa: E402
                    SpectralModel, gamma_pair, lifetimes_from)
from .wl_matrix import (WlElementRequest, wl_element_delta, wl_element_gaussian,  # noqa: E402
                        wl_matrix, wl_pure_coefficient)
from .state import (EigenSystem, HermitianOperator, assemble_rho, d_rho_d_eps,  # noqa: E402
                    eigensystem, purity_limit)
from .fisher import (CurveKind, FisherCurve, SldOperator, cfi_sld_eigenbasis,  # noqa: E402
                     cfi_tcspc, cfi_wl, fisher_curve, qfi, qfi_at, qfi_max_delta, sld)
from .two_photon import (HomResult, LossModel, Scheme, hom_cfi, hom_coincidence_prob,  # noqa: E402
                         hom_overlap, hom_result, scheme_compare)
from .oracle import (TimeGrid, project_kernel, qfi_time_grid, rho_time_grid,  # noqa: E402
                     wl_projection)

__all__ = [
    "ConvergenceError", "ExtentError", "NegativityError", "NumericsError", "StepError",
    "TruncationError", "GammaPair", "LifetimeModel", "NumericsConfig", "SpectralKind",
    "SpectralModel", "gamma_pair", "lifetimes_from", "WlElementRequest", "wl_element_delta",
    "wl_element_gaussian", "wl_matrix", "wl_pure_coefficient", "EigenSystem",
    "HermitianOperator", "assemble_rho", "d_rho_d_eps", "eigensystem", "purity_limit",
    "CurveKind", "FisherCurve", "SldOperator", "cfi_sld_eigenbasis", "cfi_tcspc", "cfi_wl",
    "fisher_curve", "qfi", "qfi_at", "qfi_max_delta", "sld", "HomResult", "LossModel",
    "Scheme", "hom_cfi", "hom_coincidence_prob", "hom_overlap", "hom_result",
    "scheme_compare", "TimeGrid", "project_kernel", "qfi_time_grid", "rho_time_grid",
    "wl_projection",
]
