"""Convexity and communicative efficiency analyses for semantic category systems."""

__version__ = "0.1.0"

from .core import (
    EvalRecord,
    HardPartition,
    MeaningModel,
    NamingSystem,
    Prior,
    Universe,
    as_naming_system,
    category_extension,
    count_major_categories,
    make_partition,
    mode_partition,
)

__all__ = [
    "EvalRecord",
    "HardPartition",
    "MeaningModel",
    "NamingSystem",
    "Prior",
    "Universe",
    "as_naming_system",
    "category_extension",
    "count_major_categories",
    "make_partition",
    "mode_partition",
    "__version__",
]
