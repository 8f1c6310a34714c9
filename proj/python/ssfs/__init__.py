"""Online feature selection over sparse streaming features.

Thin re-export of the compiled ``_core`` extension.
"""

from ._core import (  # noqa: F401
    AllZeroDifferences,
    ClassifierConfig,
    CiConfig,
    Dataset,
    DeConfig,
    Error,
    LfaConfig,
    RunConfig,
    __version__,
    binarize,
    compare,
    cross_val_accuracy,
    element_loss,
    evolve_window,
    fisher_z_test,
    lfa_complete,
    lfa_train,
    load_csv,
    make_mask,
    make_planted_dataset,
    mutate,
    partial_correlation,
    run,
    run_file,
    standardize_observed,
    wilcoxon_signed_rank,
    write_csv,
)
