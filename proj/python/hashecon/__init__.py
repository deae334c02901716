"""Password-hashing economics and Argon2 adoption analysis."""

from ._core import (
    DomainError,
    Error,
    EmptyCorpusError,
    ParseError,
    StrengthDistribution,
    __version__,
    affordable_guesses,
    apply_retention_ratio,
    chi2_gof,
    chi2_independence,
    chi2_sf,
    classify,
    compromise_rate,
    cost_per_hash,
    dunn,
    estimate_strength,
    estimate_unique_repos,
    fit_loglog,
    kruskal_wallis,
    normal_sf,
    threshold_bits,
)

__all__ = [
    "DomainError",
    "Error",
    "EmptyCorpusError",
    "ParseError",
    "StrengthDistribution",
    "__version__",
    "affordable_guesses",
    "apply_retention_ratio",
    "chi2_gof",
    "chi2_independence",
    "chi2_sf",
    "classify",
    "compromise_rate",
    "cost_per_hash",
    "dunn",
    "estimate_strength",
    "estimate_unique_repos",
    "fit_loglog",
    "kruskal_wallis",
    "normal_sf",
    "threshold_bits",
]
