"""Discrete trigonometric shearlets on the 2-torus.

Build cartoon-like test functions with edges of prescribed singularity
order, compute all shearlet coefficients through the FFT, and measure how
the coefficients decay with scale and orientation.
"""
from .admissible import AdmissibleProfile, WindowFunction
from .analysis import (
    DecayReport,
    OrientationSet,
    SweepRow,
    classify_order,
    decay_fit,
    orientation_set,
    orientation_sets,
    run_decay,
    sweep,
)
from .cartoon import (
    Arc,
    CartoonFunction,
    StarSet,
    build_graded_cartoon,
    chi_cartoon,
    fig1_cartoon,
    single_order_cartoon,
)
from .oracle import PolynomialField, ft_region_boundary, ft_region_quadrature
from .shearlets import ShearletIndex, orientation_angle, pattern, shears
from .transform import (
    CoefficientGrid,
    SpectrumGrid,
    analysis_all,
    analysis_single,
    coefficient_pyramid,
    fourier_coefficients,
    spectrum_from_function,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleProfile", "WindowFunction", "DecayReport", "OrientationSet", "SweepRow",
    "classify_order", "decay_fit", "orientation_set", "orientation_sets", "run_decay", "sweep",
    "Arc", "CartoonFunction", "StarSet", "build_graded_cartoon", "chi_cartoon", "fig1_cartoon",
    "single_order_cartoon", "PolynomialField", "ft_region_boundary", "ft_region_quadrature",
    "ShearletIndex", "orientation_angle", "pattern", "shears", "CoefficientGrid", "SpectrumGrid",
    "analysis_all", "analysis_single", "coefficient_pyramid", "fourier_coefficients",
    "spectrum_from_function",
]
