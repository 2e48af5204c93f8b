"""rlekit: RLE-plot diagnostics for unwanted variation in wide data matrices.

Builds relative log expression (RLE) summaries of sample-by-feature
matrices, simulates additive and non-additive sample effects to show what
drives "bad" RLE plots, decomposes the non-additive residual into rank-1
components by SVD, and renders deterministic SVG boxplot figures.
"""

from .decompose import (DecompositionResult, decompose, remove_additive_sample_effect,
                        remove_nonadditive, rle_series, svd_partition, twoway_residual)
from .kernels import backend as kernel_backend
from .matrix import (ExpressionMatrix, ParseError, attach_groups, load_matrix,
                     log_transform, save_matrix)
from .render import RenderSpec, render_boxplots, render_panel
from .simulate import (Batch, SimulatedDataset, SimulationConfig, interaction_term,
                       scenario, simulate)
from .stats import (BoxplotStats, DeviationMatrix, boxplot_stats, gene_medians,
                    rle_deviations, rle_summary, standard_boxplot_summary,
                    summaries_from_json, summaries_to_csv, summaries_to_json)

__version__ = "0.1.0"

__all__ = [
    "ExpressionMatrix", "ParseError", "load_matrix", "save_matrix",
    "log_transform", "attach_groups",
    "DeviationMatrix", "BoxplotStats", "gene_medians", "rle_deviations",
    "boxplot_stats", "rle_summary", "standard_boxplot_summary",
    "summaries_to_json", "summaries_from_json", "summaries_to_csv",
    "Batch", "SimulationConfig", "SimulatedDataset", "interaction_term",
    "simulate", "scenario",
    "DecompositionResult", "remove_additive_sample_effect", "twoway_residual",
    "svd_partition", "remove_nonadditive", "decompose", "rle_series",
    "RenderSpec", "render_boxplots", "render_panel",
    "kernel_backend",
]
