"""Community detection on ratios of adjacency eigenvectors.

The pipeline: load a graph, take its K leading (largest-magnitude)
eigenvectors, divide the trailing ones entrywise by the first to cancel
degree effects, and k-means the resulting rows.  Classical spectral baselines
(raw and degree-normalized eigenvector rows, q-norm row scaling) and a
degree-corrected block model simulation harness round out the toolkit.
"""

from .cluster import KMeansResult, Labeling, kmeans, threshold_classify
from .dcbm import (DCBMParams, Diagnostics, PopulationSpectrum, ThetaPattern,
                   block_labels, build_omega, diagnostics, permuted_theta,
                   population_ratio_matrix, population_spectrum, r0_vector,
                   sample_adjacency)
from .eigen import EigenPair, Spectrum, leading_eigs
from .embed import (Embedding, RatioMatrix, npca_embed, opca_embed,
                    score_ratio, scoreq_embed)
from .errors import (DataError, DegeneracyError, ModelValidityError,
                     NonConvergenceError, NumericalError, ParseError)
from .experiments import (PRESETS, ExperimentConfig, RunReport,
                          config_from_text, config_to_text, run_experiment)
from .graph import (Graph, from_edges, giant_component, load_edge_list,
                    load_labels, remove_isolated)
from .metrics import HammingResult, hamming_error, summarize
from .pipeline import MethodResult, parse_method, run_method

__version__ = "0.1.0"

__all__ = [
    "DCBMParams", "DataError", "DegeneracyError", "Diagnostics", "EigenPair",
    "Embedding", "ExperimentConfig", "Graph", "HammingResult", "KMeansResult",
    "Labeling", "MethodResult", "ModelValidityError", "NonConvergenceError",
    "NumericalError", "PRESETS", "ParseError", "PopulationSpectrum",
    "RatioMatrix", "RunReport", "Spectrum", "ThetaPattern", "block_labels",
    "build_omega", "config_from_text", "config_to_text", "diagnostics",
    "from_edges", "giant_component", "hamming_error", "kmeans",
    "leading_eigs", "load_edge_list", "load_labels", "npca_embed",
    "opca_embed", "parse_method", "permuted_theta", "population_ratio_matrix",
    "population_spectrum", "r0_vector", "remove_isolated", "run_experiment",
    "run_method", "sample_adjacency", "score_ratio", "scoreq_embed",
    "summarize", "threshold_classify",
]
