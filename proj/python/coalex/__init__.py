"""Coalitional influence explanations for tabular classifiers.

Thin re-export of the compiled ``_coalex`` module. Influence vectors follow
the dataset's attribute order; classes are referred to by their label text.
"""

from ._coalex import (
    CapExceeded,
    ClassTarget,
    Coalition,
    ConfigError,
    DataError,
    Dataset,
    Explainer,
    InfluenceVector,
    ModelSpec,
    closure_size,
    complexity_proportion,
    find_threshold,
    group,
    grouping_methods,
    influence_distance,
    make_synthetic,
    run_benchmark,
)

__all__ = [
    "CapExceeded",
    "ClassTarget",
    "Coalition",
    "ConfigError",
    "DataError",
    "Dataset",
    "Explainer",
    "InfluenceVector",
    "ModelSpec",
    "closure_size",
    "complexity_proportion",
    "find_threshold",
    "group",
    "grouping_methods",
    "influence_distance",
    "make_synthetic",
    "run_benchmark",
]

__version__ = "0.1.0"
