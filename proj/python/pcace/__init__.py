"""Rank convolutional channels by PCA-reduced maximal correlation (PCACE)."""

from ._core import (
    AceResult,
    ActivationDump,
    PcaceError,
    PcaceRanking,
    PipelineConfig,
    RankingEntry,
    SmootherConfig,
    ace,
    compare_rankings,
    histogram,
    load_dump,
    pca_reduce,
    pcace_channel,
    rank_layer,
    smooth,
    sorted_values,
    standardize_rows,
    write_dump,
)

__all__ = [
    "AceResult",
    "ActivationDump",
    "PcaceError",
    "PcaceRanking",
    "PipelineConfig",
    "RankingEntry",
    "SmootherConfig",
    "ace",
    "compare_rankings",
    "histogram",
    "load_dump",
    "pca_reduce",
    "pcace_channel",
    "rank_layer",
    "smooth",
    "sorted_values",
    "standardize_rows",
    "write_dump",
]
