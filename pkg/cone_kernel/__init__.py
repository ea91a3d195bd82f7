"""
Cone Kernel - Schrodinger kernel on a flat euclidean cone

This library evaluates the kernel of exp(it*Laplacian) on the cone over a circle of
radius rho:
- Bessel-Fourier series (reference oracle, valid everywhere)
- Loop-contour quadrature (valid on the interface, moderate x)
- Small-x and uniform large-x asymptotic expansions with labelled terms
- Method-of-images closed forms when 1/rho is an integer
- A cross-validation harness and the `conekernel` CLI

Usage:
    from cone_kernel import ConeGeometry, KernelQuery, assemble_kernel, reduce
    from cone_kernel.evaluators import evaluate_auto

    g = ConeGeometry(rho=0.75)
    q = KernelQuery(t=1.0, r1=2.0, r2=3.0, theta1=1.0, theta2=0.25)
    args = reduce(q, g)

    # S(x, eta) with the cheapest valid method, then the kernel
    S = evaluate_auto(args.x, args.eta, g)
    K = assemble_kernel(S, q, g)
"""

__version__ = "0.1.0"

from .asymptotic import (
    b_taylor,
    erfc_front,
    images_closed_form,
    kernel_breakdown,
    residue_terms,
    s_alpha_uniform,
    s_images,
    s_preliminary,
    s_small_x,
    s_uniform,
)
from .contour import s_contour
from .exceptions import (
    AccuracyException,
    ConeKernelException,
    DomainException,
    GeometryException,
    ValidityException,
)
from .harness import Harness
from .kernel import (
    assemble_kernel,
    canonical_eta,
    interface_distance,
    is_on_interface,
    pole_phases,
    prefactor,
    reduce,
    time_reversed,
)
from .models import (
    BCoeffs,
    ConeGeometry,
    ContourSpec,
    EvalResult,
    ExpansionBreakdown,
    KernelBreakdown,
    KernelQuery,
    Method,
    PolePhase,
    PolePhaseSet,
    ReducedArgs,
    SeriesConfig,
    SpecFunConfig,
)
from .schemas import GridSpec, Report
from .series import heat_images_closed_form, heat_kernel, s_series
from .settings import Settings, load_settings
from .specfun import bessel_i, bessel_i_scaled, bessel_j, erfc_cplx, gamma_pos, log_gamma_pos

__all__ = [
    # Kernel core
    "reduce",
    "prefactor",
    "pole_phases",
    "interface_distance",
    "is_on_interface",
    "canonical_eta",
    "assemble_kernel",
    "time_reversed",

    # Evaluators of S
    "s_series",
    "s_contour",
    "s_small_x",
    "s_uniform",
    "s_alpha_uniform",
    "s_preliminary",
    "s_images",
    "heat_kernel",
    "heat_images_closed_form",

    # Asymptotic pieces
    "residue_terms",
    "erfc_front",
    "b_taylor",
    "kernel_breakdown",
    "images_closed_form",

    # Special functions
    "bessel_j",
    "bessel_i",
    "bessel_i_scaled",
    "erfc_cplx",
    "gamma_pos",
    "log_gamma_pos",

    # Models
    "ConeGeometry",
    "KernelQuery",
    "ReducedArgs",
    "PolePhase",
    "PolePhaseSet",
    "EvalResult",
    "Method",
    "SpecFunConfig",
    "SeriesConfig",
    "ContourSpec",
    "BCoeffs",
    "ExpansionBreakdown",
    "KernelBreakdown",
    "GridSpec",
    "Report",

    # Harness and configuration
    "Harness",
    "Settings",
    "load_settings",

    # Exceptions
    "ConeKernelException",
    "DomainException",
    "AccuracyException",
    "GeometryException",
    "ValidityException",

    # Version
    "__version__",
]
