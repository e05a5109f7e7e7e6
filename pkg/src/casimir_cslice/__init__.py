"""Casimir-Lifshitz pressure in planar cavities with stratified anisotropic media.

Layers are described by diagonal permittivity and permeability tensors,
combined with 4x4 transfer matrices on the imaginary-frequency axis, and the
regularised stress is integrated over imaginary frequency and in-plane
wavevector. C-slice media (``eps = mu = diag(1/m, 1/m, m)``) act as a
compression of vacuum and change the pressure only through the effective
cavity width.
"""
from .errors import (NumericalError, PropagationOverflowError, QuadratureError,
                     SingularMatrixError)
from .experiments import (ConvergenceRow, ScenarioReport, run_cslice, run_divergence,
                          run_empty_cavity)
from .materials import (IDEAL_MIRROR, OPEN_VACUUM, VACUUM, BoundarySpec, CompressionProfile,
                        Layer, MaterialSpec, Stack, compression_factor, cslice_material,
                        discretize, effective_length, isotropic_material, parse_profile,
                        virtual_width)
from .stress import (QuadratureConfig, StressResult, pressure_cslice_analytic, pressure_ideal,
                     pressure_on_mirror, stress_at_point)
from .transfer import (ReflectionMatrix, TransferMatrix, interface_matrix, propagation_matrix,
                       reflection_matrix, stack_transfer)
from .wavesolver import SpectralPoint, axial_constants, dynamical_matrix, mode_basis

__version__ = "0.1.0"

__all__ = [
    "BoundarySpec", "CompressionProfile", "ConvergenceRow", "IDEAL_MIRROR", "Layer",
    "MaterialSpec", "NumericalError", "OPEN_VACUUM", "PropagationOverflowError",
    "QuadratureConfig", "QuadratureError", "ReflectionMatrix", "ScenarioReport",
    "SingularMatrixError", "SpectralPoint", "Stack", "StressResult", "TransferMatrix",
    "VACUUM", "axial_constants", "compression_factor", "cslice_material", "discretize",
    "dynamical_matrix", "effective_length", "interface_matrix", "isotropic_material",
    "mode_basis", "parse_profile", "pressure_cslice_analytic", "pressure_ideal",
    "pressure_on_mirror", "propagation_matrix", "reflection_matrix", "run_cslice",
    "run_divergence", "run_empty_cavity", "stack_transfer", "stress_at_point",
    "virtual_width",
]
