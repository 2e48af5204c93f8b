"""Single home for every statistical default shared by the library and the CLI.

Changing a value here changes it everywhere; the CLI reads its argparse
defaults from this table, so the two cannot drift.
"""

# Boxplot construction.
QUANTILE_METHOD = "linear"  # type-7 linear interpolation; "hinges" = Tukey hinges
WHISKER_COEF = 1.5          # Tukey fence coefficient, whiskers snap to data

# Log transformation (microarray convention).
LOG_BASE = 2.0
LOG_OFFSET = 0.0

# Ingestion.
ORIENTATION = "samples"     # rows of the file are samples

# Decomposition.
RANK_TOL = 1e-12            # components with sigma_k <= RANK_TOL * sigma_1 are dropped

# Rendering: fixed palette assigned to groups in first-appearance order.
PALETTE = (
    "#4c72b0",
    "#dd8452",
    "#55a868",
    "#c44e52",
    "#8172b3",
    "#937860",
    "#da8bc3",
    "#8c8c8c",
    "#ccb974",
    "#64b5cd",
)
