"""Batch soft-sensor toolkit: pipeline driver and core operations."""

try:
    from ._softsense import (  # installed package layout
        FitError,
        InputError,
        __version__,
        baseline_thresholds,
        ci_analysis,
        config_hash,
        predict,
        run,
        select_D,
        select_d,
        shapley,
        stepwise_search,
    )
except ImportError:  # in-tree build: extension on sys.path next to the build dir
    from _softsense import (
        FitError,
        InputError,
        __version__,
        baseline_thresholds,
        ci_analysis,
        config_hash,
        predict,
        run,
        select_D,
        select_d,
        shapley,
        stepwise_search,
    )

__all__ = [
    "FitError",
    "InputError",
    "__version__",
    "baseline_thresholds",
    "ci_analysis",
    "config_hash",
    "predict",
    "run",
    "select_D",
    "select_d",
    "shapley",
    "stepwise_search",
]
