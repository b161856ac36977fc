"""Numerical laboratory for two-grid and V-cycle error propagation in
weighted inner products induced by an HPD matrix."""

from . import (
    bspace,
    errors,
    kernel,
    probgen,
    smoother,
    transfer,
    twogrid,
    vcycle,
)
from .bspace import BNormalityReport, BSpace, lambda_min_plus
from .kernel import HermitianEigen, Spectrum, general_spectrum, hermitian_eig, hpd_sqrt
from .probgen import CoarseningSpec, ProblemSpec, SmootherSpec, generate
from .smoother import SmootherContext, SmoothingReport, build_smoother, eigen_map
from .transfer import CoarseGridCorrection, TransferPair, build_correction
from .twogrid import SharpBoundReport, TwoGridOperator, assemble, k_constant, sharp_report
from .vcycle import McCormickReport, VCycleHierarchy, build_hierarchy

__version__ = "0.1.0"

__all__ = [
    "BNormalityReport",
    "BSpace",
    "CoarseGridCorrection",
    "CoarseningSpec",
    "HermitianEigen",
    "McCormickReport",
    "ProblemSpec",
    "SharpBoundReport",
    "SmootherContext",
    "SmootherSpec",
    "SmoothingReport",
    "Spectrum",
    "TransferPair",
    "TwoGridOperator",
    "VCycleHierarchy",
    "assemble",
    "bspace",
    "build_correction",
    "build_hierarchy",
    "build_smoother",
    "eigen_map",
    "errors",
    "general_spectrum",
    "generate",
    "hermitian_eig",
    "hpd_sqrt",
    "k_constant",
    "kernel",
    "lambda_min_plus",
    "probgen",
    "sharp_report",
    "smoother",
    "transfer",
    "twogrid",
    "vcycle",
]
