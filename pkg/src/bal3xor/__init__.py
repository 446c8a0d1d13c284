"""Balanced random 3XOR instances and their canonical 3SAT translation.

Core pieces: bit-packed GF(2) linear algebra (:mod:`bal3xor.gf2`), a
label-balanced instance sampler, the four-clauses-per-XOR translation with
its exact inverse, a brute-force verification harness, the survivor-parity
projection, and an evaluator for the size-aware success bound.
"""

from .gf2 import GF2Matrix, GF2Vector, left_kernel_basis, rank, sample_coset_uniform
from .sampler import GenConfig, XorClause, XorInstance, XorSkeleton, generate_batch, generate_instance
from .translate import CnfFormula, NotInWindowError, XorToCnf, invert, read_dimacs, translate, write_dimacs
from .verify import brute_force_sat, recompute_label, verify_directory
from .projection import SurvivorProjection, measure_preservation_check, project
from .bounds import BoundParams, success_bound
from .twosat import TwoSatInstance, decide
from .pipeline import SweepConfig, run_diagnostics, run_full_export, run_rank_sweep

__version__ = "0.1.0"

__all__ = [
    "GF2Matrix", "GF2Vector", "left_kernel_basis", "rank", "sample_coset_uniform",
    "GenConfig", "XorClause", "XorInstance", "XorSkeleton", "generate_batch", "generate_instance",
    "CnfFormula", "NotInWindowError", "XorToCnf", "invert", "read_dimacs", "translate", "write_dimacs",
    "brute_force_sat", "recompute_label", "verify_directory",
    "SurvivorProjection", "measure_preservation_check", "project",
    "BoundParams", "success_bound", "TwoSatInstance", "decide",
    "SweepConfig", "run_diagnostics", "run_full_export", "run_rank_sweep",
]
