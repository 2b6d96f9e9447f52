"""Optimal time-vertex graph filtering in fractional Fourier domains."""

__version__ = "0.1.0"

from .errors import (FracTVError, InvalidInputError, InvalidParameterError, ParseError,
                     UnsupportedOperatorError)
from .graph import (CycleShift, Graph, SpectralDecomposition, build_knn_graph, cycle_laplacian,
                    eigendecompose, laplacian)
from .transforms import JointSpectrum, TimeVertexSignal, dft_matrix, ijft, jft
from .fractional import (FractionalBasis, FractionalFamily, JointFractionalBasis, fractional_transform,
                         gfso, jfrft, joint_shifts, normalize_energy_preserving)
from .wiener import (FilterCoefficients, WienerSystem, apply_joint_filter, assemble_wiener_system,
                     build_regression_matrix, build_vandermonde, frequency_response, solve_coefficients)
from .baselines import MedianConfig, TikhonovConfig, recursive_median_filter, tikhonov_denoise
from .pipeline import (DenoiseReport, ExperimentConfig, add_noise, grid_search, run_experiment, segment,
                       snr_db, two_stage_denoise)
