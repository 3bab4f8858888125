"""Multi-objective quality-diversity with unstructured and grid archives."""

__version__ = "0.1.0"

from .core import Bounds, DescriptorData, EvaluationResult, Genome, Solution, clip_genome
from .grid import CvtTessellation, GridArchive, assign_cell, build_cvt
from .metrics import coverage, global_hypervolume, moqd_score, project_to_grid, qd_score
from .pareto import dominates, extract_front, hypervolume, mc_hypervolume
from .unstructured import AdditionOutcome, Status, UnstructuredArchive
