"""Power spectrum signatures of vertex functions.

Spectra of vertex indicators under a symmetric operator (a normalized graph
Laplacian or a diffusion-map matrix), their quantile summaries, exact 1-D
Wasserstein comparison, and numerical checks of the W1 Lipschitz bound.
"""
from ._kernels import BACKEND
from .graph import Graph, adjacency_matrix, indicator, normalized_laplacian, pair_indicator
from .measures import (
    DiscreteMeasure,
    QuantileVector,
    cdf,
    expectation,
    make_probability_measure,
    quantile,
    sample_quantiles,
    wasserstein,
    wasserstein_from_quantiles,
)
from .signatures import (
    PowerSpectrum,
    diffusion_distance_sq,
    global_point_signature,
    heat_kernel_signature,
    power_spectrum,
    reconstruct_matrix,
    signature_distance_matrix,
    vertex_spectrum,
    wavelet_signature,
)
from .spectral import SpectralDecomposition, decompose, operator_two_norm, projection, spectral_gap

__version__ = "0.1.0"
