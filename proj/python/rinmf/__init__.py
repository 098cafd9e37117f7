"""Rule-interpretable non-negative matrix factorization.

Thin wrapper over the C++ core. Matrices are numpy float64 arrays; rules,
groupings and solver configuration are small record types. See
``help(rinmf.solve)`` for the main entry point.
"""

try:  # installed layout: the extension lives inside the package
    from ._rinmf import *  # noqa: F401,F403
    from ._rinmf import __doc__ as _core_doc  # noqa: F401
except ImportError:  # build-tree layout: extension sits on sys.path
    from _rinmf import *  # noqa: F401,F403
    from _rinmf import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"

__all__ = [
    "Rule",
    "RuleSet",
    "RuleGrouping",
    "ClusterAssignment",
    "Constraints",
    "SolverConfig",
    "FactorModel",
    "Compensation",
    "EvalReport",
    "SyntheticData",
    "coverage",
    "jaccard",
    "build_p",
    "build_a",
    "build_ideal",
    "single_rule_exposure",
    "kmeans_rules",
    "kmeans_rules_supervised",
    "rfa_assign",
    "grouping_from_assignment",
    "cluster_assignment",
    "solve",
    "init_factors",
    "objective",
    "lambda_value",
    "grad_f",
    "detect_compensations",
    "hoyer_project_to_sparseness",
    "hoyer_sparseness",
    "mean_row_sparseness",
    "representation_error",
    "description_error",
    "correspondence",
    "avg_corr_difference",
    "evaluate_model",
    "generate_synthetic",
    "variants",
]
