"""Information-theoretic and statistical metrics for symbolic-music corpora."""

__version__ = "0.1.0"

from mirlab.chordnet import (  # noqa: E402
    ChordGraph,
    NetworkAnalysis,
    NetworkFeatureVector,
    chord_graph,
    feature_vector,
    gravity_one_hot,
    network_analysis,
    pairwise_network_distance,
)
from mirlab.distributions import (  # noqa: E402
    Alphabet,
    DegenerateInputError,
    bigram_counts,
    collapse_duplicates,
    counts_from_sequence,
    smooth,
)
from mirlab.dynamics import (  # noqa: E402
    FractalDimension,
    StationarityResult,
    higuchi_fractal_dimension,
    stationarity_test,
)
from mirlab.information import (  # noqa: E402
    DivergenceMatrix,
    divergence_bootstrap_ci,
    divergence_corpus_bootstrap_ci,
    js_divergence,
    kl_divergence,
    kl_pairwise_matrix,
    shannon_entropy,
)
from mirlab.intervals import (  # noqa: E402
    IntervalAnalysis,
    interval_analysis,
    interval_param_bootstrap,
    intervals_from_sequence,
)
from mirlab.rankshape import GiniReport, ZipfFit, gini, gini_multi, zipf_fit  # noqa: E402
from mirlab.resample import (  # noqa: E402
    JackknifeReport,
    bootstrap_mean_ci,
    jackknife_spearman,
    spearman,
)
from mirlab.rubato import (  # noqa: E402
    ClassifierThresholds,
    DominantPeriod,
    RubatoAnalysis,
    classify_corpus,
    paired_delta_ci,
    rubato_spectral,
    threshold_sensitivity,
)

__all__ = [
    "__version__",
    "Alphabet",
    "bigram_counts",
    "bootstrap_mean_ci",
    "chord_graph",
    "ChordGraph",
    "ClassifierThresholds",
    "classify_corpus",
    "collapse_duplicates",
    "counts_from_sequence",
    "DegenerateInputError",
    "divergence_bootstrap_ci",
    "divergence_corpus_bootstrap_ci",
    "DivergenceMatrix",
    "DominantPeriod",
    "feature_vector",
    "FractalDimension",
    "gini",
    "gini_multi",
    "GiniReport",
    "gravity_one_hot",
    "higuchi_fractal_dimension",
    "interval_analysis",
    "interval_param_bootstrap",
    "IntervalAnalysis",
    "intervals_from_sequence",
    "jackknife_spearman",
    "JackknifeReport",
    "js_divergence",
    "kl_divergence",
    "kl_pairwise_matrix",
    "network_analysis",
    "NetworkAnalysis",
    "NetworkFeatureVector",
    "paired_delta_ci",
    "pairwise_network_distance",
    "rubato_spectral",
    "RubatoAnalysis",
    "shannon_entropy",
    "smooth",
    "spearman",
    "stationarity_test",
    "StationarityResult",
    "threshold_sensitivity",
    "zipf_fit",
    "ZipfFit",
]
