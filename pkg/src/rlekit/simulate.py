"""Synthetic log-expression matrices with additive and non-additive sample effects.

Each value is gene mean + sample effect + interaction + noise. Gene means
and sample effects are Gaussian; per-gene noise precisions are Gamma so
the noise variances are inverse-gamma; the interaction is the Tukey/Mandel
multiplicative form (centered sample effect) x (centered gene mean),
scaled by a constant that usually acts as an on/off switch. Batch effects
come from giving sample ranges different effect locations.

Reproducibility: draws come from ``numpy.random.default_rng(seed)``
(PCG64) in a fixed order -- gene means, then sample effects in sample
order, then noise precisions, then noise gene-by-gene -- so a (seed,
config) pair pins the dataset exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .matrix import ExpressionMatrix

__all__ = [
    "Batch",
    "SimulationConfig",
    "SimulatedDataset",
    "interaction_term",
    "simulate",
    "scenario",
    "SCENARIO_IDS",
]

SCENARIO_IDS = (1, 2, 3, 4)


@dataclass(frozen=True)
class Batch:
    """Contiguous 1-based inclusive sample range sharing one effect location."""

    start: int
    stop: int
    effect_loc: float

    def __post_init__(self):
        if self.start < 1 or self.stop < self.start:
            raise ValueError(f"invalid batch range [{self.start}, {self.stop}]")


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of the generative model.

    ``noise_var_override`` pins every gene's noise variance to a fixed
    value instead of drawing it (a testing hook, deliberately absent from
    the scenario presets); with it set to 0 the noise vanishes entirely.
    """

    n_samples: int
    n_genes: int
    gene_mean_loc: float = 5.0
    gene_mean_var: float = 0.5
    batches: tuple[Batch, ...] = ()
    sample_effect_var: float = 0.5
    interaction_scale: float = 0.0
    precision_shape: float = 10.0
    precision_rate: float = 1.0
    seed: int = 0
    noise_var_override: float | None = field(default=None)

    def __post_init__(self):
        if self.n_samples < 1 or self.n_genes < 1:
            raise ValueError("n_samples and n_genes must be >= 1")
        if self.gene_mean_var < 0 or self.sample_effect_var < 0:
            raise ValueError("variances must be >= 0")
        if self.precision_shape <= 1:
            raise ValueError(
                f"precision_shape must be > 1 for a finite mean noise variance, "
                f"got {self.precision_shape}"
            )
        if self.precision_rate <= 0:
            raise ValueError(f"precision_rate must be > 0, got {self.precision_rate}")
        if self.noise_var_override is not None and self.noise_var_override < 0:
            raise ValueError("noise_var_override must be >= 0")
        batches = tuple(self.batches) or (Batch(1, self.n_samples, 0.0),)
        object.__setattr__(self, "batches", batches)
        ordered = sorted(batches, key=lambda b: b.start)
        if ordered[0].start != 1 or ordered[-1].stop != self.n_samples:
            raise ValueError(
                f"batches must cover samples 1..{self.n_samples} exactly")
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.start != prev.stop + 1:
                raise ValueError(
                    f"batches must partition 1..{self.n_samples}; "
                    f"gap or overlap at sample {cur.start}")
        mean_noise_var = self.precision_rate / (self.precision_shape - 1)
        if self.noise_var_override is None and mean_noise_var >= self.gene_mean_var:
            warnings.warn(
                f"mean noise variance {mean_noise_var:.4g} is not below the "
                f"gene-mean variance {self.gene_mean_var:.4g}; real expression "
                f"data typically varies more between genes than across samples")

    @property
    def mean_noise_var(self) -> float:
        """Expected per-gene noise variance, rate / (shape - 1)."""
        return self.precision_rate / (self.precision_shape - 1)

    def batch_of_sample(self) -> np.ndarray:
        """0-based batch index of each sample."""
        idx = np.empty(self.n_samples, dtype=np.int64)
        for b, batch in enumerate(sorted(self.batches, key=lambda x: x.start)):
            idx[batch.start - 1:batch.stop] = b
        return idx


@dataclass(frozen=True)
class SimulatedDataset:
    """A generated matrix bundled with its ground truth draws."""

    matrix: ExpressionMatrix
    gene_means: np.ndarray
    sample_effects: np.ndarray
    noise_vars: np.ndarray
    interaction: np.ndarray
    noise: np.ndarray
    config: SimulationConfig

    def truth_dict(self) -> dict:
        """Ground truth in a JSON-friendly form (for the CLI truth file)."""
        return {
            "gene_means": self.gene_means.tolist(),
            "sample_effects": self.sample_effects.tolist(),
            "noise_vars": self.noise_vars.tolist(),
            "interaction_scale": self.config.interaction_scale,
            "batches": [
                {"start": b.start, "stop": b.stop, "effect_loc": b.effect_loc}
                for b in self.config.batches
            ],
            "seed": self.config.seed,
        }


def interaction_term(sample_effects, gene_means, scale: float) -> np.ndarray:
    """Multiplicative interaction: scale * outer(centered effects, centered means).

    Centering both factors makes every row sum and column sum zero, so the
    term is orthogonal to the additive effects.
    """
    theta = np.asarray(sample_effects, dtype=np.float64)
    mu = np.asarray(gene_means, dtype=np.float64)
    if theta.size < 1 or mu.size < 1:
        raise ValueError("need at least one sample and one gene")
    return scale * np.outer(theta - theta.mean(), mu - mu.mean())


def simulate(config: SimulationConfig) -> SimulatedDataset:
    """Draw one dataset under ``config``; deterministic given the seed."""
    m, n = config.n_samples, config.n_genes
    rng = np.random.default_rng(config.seed)

    gene_means = config.gene_mean_loc + np.sqrt(config.gene_mean_var) * rng.standard_normal(n)

    batch_idx = config.batch_of_sample()
    ordered = sorted(config.batches, key=lambda b: b.start)
    effect_loc = np.array([ordered[b].effect_loc for b in batch_idx])
    sample_effects = effect_loc + np.sqrt(config.sample_effect_var) * rng.standard_normal(m)

    if config.noise_var_override is not None:
        noise_vars = np.full(n, float(config.noise_var_override))
    else:
        precisions = rng.gamma(shape=config.precision_shape,
                               scale=1.0 / config.precision_rate, size=n)
        noise_vars = 1.0 / precisions

    # Gene-major draws, transposed into samples-as-rows.
    noise = (np.sqrt(noise_vars)[:, np.newaxis] * rng.standard_normal((n, m))).T

    interaction = interaction_term(sample_effects, gene_means, config.interaction_scale)
    values = gene_means[np.newaxis, :] + sample_effects[:, np.newaxis] + interaction + noise

    groups = tuple(f"batch{b + 1}" for b in batch_idx)
    matrix = ExpressionMatrix(
        values,
        tuple(f"S{i + 1}" for i in range(m)),
        tuple(f"G{j + 1}" for j in range(n)),
        groups,
    )
    return SimulatedDataset(matrix, gene_means, sample_effects, noise_vars,
                            interaction, noise, config)


def scenario(scenario_id: int, seed: int = 0) -> SimulationConfig:
    """Preset configurations of the four simulation scenarios.

    All use 30 samples, 10,000 genes, gene means N(5, 0.5), sample-effect
    variance 0.5, and Gamma(10, 1) noise precisions (mean noise variance
    1/9, about 0.11). Scenarios: 1 additive only, 2 additive in two
    batches (samples 26-30 shifted by +2), 3 additive plus interaction,
    4 both batches and interaction.
    """
    if scenario_id not in SCENARIO_IDS:
        raise ValueError(f"scenario must be one of {SCENARIO_IDS}, got {scenario_id}")
    two_batches = (Batch(1, 25, 0.0), Batch(26, 30, 2.0))
    one_batch = (Batch(1, 30, 0.0),)
    batches = two_batches if scenario_id in (2, 4) else one_batch
    interaction_scale = 1.0 if scenario_id in (3, 4) else 0.0
    return SimulationConfig(
        n_samples=30,
        n_genes=10_000,
        gene_mean_loc=5.0,
        gene_mean_var=0.5,
        batches=batches,
        sample_effect_var=0.5,
        interaction_scale=interaction_scale,
        precision_shape=10.0,
        precision_rate=1.0,
        seed=seed,
    )
