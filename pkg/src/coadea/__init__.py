"""coadea: convex Pareto frontier generation for constrained bi-objective problems.

A cuckoo-search population loop whose fitness is the CCR efficiency score of
each habitat's objective vector within the current population; habitats that
score 1 accumulate into an archive whose non-dominated subset is the frontier.
"""

from coadea.dea import DmuSet, EfficiencyReport, build_ccr, efficiency_scores, shift_to_positive
from coadea.engine import CoaConfig, Habitat, RunResult, run
from coadea.lp import LinearProgram, LpSolution, enumerate_vertices_oracle, solve
from coadea.pareto import (
    ParetoArchive,
    dominates,
    generational_distance,
    hypervolume_2d,
    non_dominated_filter,
    reference_front,
    spacing,
)
from coadea.problems import ProblemSpec, builtin, evaluate_objectives, from_expressions, is_feasible

__version__ = "0.1.0"

__all__ = [
    "CoaConfig", "DmuSet", "EfficiencyReport", "Habitat", "LinearProgram", "LpSolution",
    "ParetoArchive", "ProblemSpec", "RunResult", "build_ccr", "builtin", "dominates",
    "efficiency_scores", "enumerate_vertices_oracle", "evaluate_objectives",
    "from_expressions", "generational_distance", "hypervolume_2d", "is_feasible",
    "non_dominated_filter", "reference_front", "run", "shift_to_positive", "solve",
    "spacing", "__version__",
]
