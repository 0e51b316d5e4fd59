"""Clark measures of rational self-maps of the polydisc, built and checked numerically."""

from .clark import (
    ClarkCertificate,
    RadialApproximant,
    alpha_continuity_scan,
    clark_1d,
    clark_graph_2d,
    clark_symbol,
    construct_clark,
    slice_measure,
    verify_disintegration,
    verify_slice_decomposition,
    weakstar_integrate,
)
from .errors import *  # noqa: F401,F403
from .inner_functions import (
    InnerCertificate,
    RationalMap,
    catalog,
    diag_slice,
    inner_certificate,
    partial_derivative,
    vertical_slice,
)
from .kernels import DiscPoint, TorusPoint, cauchy_kernel, poisson_kernel, reproducing_kernel
from .measures import (
    QuadratureSpec,
    cauchy_transform,
    fourier_coeff,
    integrate,
    pluriharmonic_support_check,
    poisson_integral,
    total_mass,
)

__version__ = "0.1.0"
