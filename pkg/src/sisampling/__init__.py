"""Compactly supported reconstruction filters for oversampled generalized sampling
in shift-invariant spaces, decided and computed through matrix pencils."""
from .decision import ExistenceReport, existence_check, frame_scan, monomial_minor_oracle
from .estimator import SamplingReconstructor
from .generators import (GeneratorSpec, ProblemError, SamplingProblem, SystemSpec, build_G,
                         lphi_samples)
from .leftinv import (DegreeCapExceeded, LeftInverse, NoPolynomialInverse, backmap_to_G,
                      solve_general, solve_min_oversampling)
from .pencil import KroneckerStructure, Pencil, RankAmbiguous, spectrum_oracle, staircase
from .poly import LaurentPoly, PolyMatrix
from .reconstruct import (ReconstructionFilters, design_filters, reconstruct_eval,
                          sample_function, verify_reconstruction)
from .reduction import ReductionTrace, reduce_problem

__version__ = "0.1.0"

__all__ = [
    "DegreeCapExceeded",
    "ExistenceReport",
    "GeneratorSpec",
    "KroneckerStructure",
    "LaurentPoly",
    "LeftInverse",
    "NoPolynomialInverse",
    "Pencil",
    "PolyMatrix",
    "ProblemError",
    "RankAmbiguous",
    "ReconstructionFilters",
    "ReductionTrace",
    "SamplingProblem",
    "SamplingReconstructor",
    "SystemSpec",
    "backmap_to_G",
    "build_G",
    "design_filters",
    "existence_check",
    "frame_scan",
    "lphi_samples",
    "monomial_minor_oracle",
    "reconstruct_eval",
    "reduce_problem",
    "sample_function",
    "solve_general",
    "solve_min_oversampling",
    "spectrum_oracle",
    "staircase",
    "verify_reconstruction",
]
