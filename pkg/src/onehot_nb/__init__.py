"""Categorical vs one-hot (product-of-Bernoullis) Naive Bayes."""

__version__ = "0.1.0"

from .encoding import (
    OneHotGroup,
    detect_one_hot_groups,
    generate_dataset,
    one_hot_decode,
    one_hot_encode,
)
from .experiments import (
    ComparisonRecord,
    ExperimentConfig,
    ScatterRecord,
    SummaryStats,
    bound_curves,
    run_posterior_comparison,
    run_scatter,
    sample_classifier,
    surface_grid,
    winning_class_analysis,
)
from .models import (
    Layout,
    Model,
    NBParams,
    categorical_posterior,
    fit_mle,
    map_class,
    multi_feature_posterior,
    pob_likelihood,
    pob_posterior,
    q_factor,
)
from .qfactor import (
    BoundPair,
    extremeness_guaranteed,
    f_j,
    lower_bound,
    q_optimum,
    ratio_bounds,
    upper_bound,
)
from .simplex import ProbVector, RngSeed, make_prob_vector, sample_dirichlet

__all__ = [
    "bound_curves",
    "BoundPair",
    "categorical_posterior",
    "ComparisonRecord",
    "detect_one_hot_groups",
    "ExperimentConfig",
    "extremeness_guaranteed",
    "f_j",
    "fit_mle",
    "generate_dataset",
    "Layout",
    "lower_bound",
    "make_prob_vector",
    "map_class",
    "Model",
    "multi_feature_posterior",
    "NBParams",
    "one_hot_decode",
    "one_hot_encode",
    "OneHotGroup",
    "pob_likelihood",
    "pob_posterior",
    "ProbVector",
    "q_factor",
    "q_optimum",
    "ratio_bounds",
    "RngSeed",
    "run_posterior_comparison",
    "run_scatter",
    "sample_classifier",
    "sample_dirichlet",
    "ScatterRecord",
    "SummaryStats",
    "surface_grid",
    "upper_bound",
    "winning_class_analysis",
]
