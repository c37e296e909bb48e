"""Automatic coreset construction over discovered-query loss matrices."""

from _autocore import (  # noqa: F401
    AutoResult,
    Coreset,
    Dataset,
    IterationRecord,
    LossMatrix,
    Query,
    RunTrace,
    approximation_error,
    autocoreset,
    caratheodory,
    convex_witness_check,
    eval_loss_column,
    frank_wolfe,
    generate_synthetic,
    load_csv,
    median_of_means,
    multiplicative_transform,
    one_mean_sensitivities,
    run_experiment_json,
    sensitivity_sampling,
    uniform_sampling,
    vsum_error,
)
