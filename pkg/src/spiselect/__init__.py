"""Delay-reconstruction parameter selection by shared predictive information.

The typical workflow: generate or load a scalar trace, sweep SPI over an
``(m, tau)`` grid, pick the SPI-optimal cell and check it with a
method-of-analogues forecast.

>>> from spiselect import generate_benchmark_trace, grid_sweep, select_spi_optimal
"""

from .dynamics import GenerationProtocol, generate_benchmark_trace
from .errors import DataError, NumericalError, SpiError
from .forecast import ForecastConfig, ForecastResult, mase, rolling_forecast
from .heuristics import HeuristicResult, ami_first_minimum_tau, fnn_dimension
from .infotheory import MIEstimate, SpiRequest, box_kernel_mi, knn_entropy, ksg_mi, r_of_p, spi
from .io import load_timeseries_csv, read_heatmap_csv, write_heatmap_csv, write_timeseries_csv
from .neighbors import NeighborIndex
from .sweep import (SweepGrid, antisymmetry_score, best_mase, data_length_curve, grid_sweep,
                    horizon_curves, select_spi_optimal)
from .timeseries import ReconstructionParams, TimeSeries, build_delay_vectors, split_train_test

__all__ = [
    "DataError", "ForecastConfig", "ForecastResult", "GenerationProtocol", "HeuristicResult",
    "MIEstimate", "NeighborIndex", "NumericalError", "ReconstructionParams", "SpiError",
    "SpiRequest", "SweepGrid", "TimeSeries", "ami_first_minimum_tau", "antisymmetry_score",
    "best_mase", "box_kernel_mi", "build_delay_vectors", "data_length_curve", "fnn_dimension",
    "generate_benchmark_trace", "grid_sweep", "horizon_curves", "knn_entropy", "ksg_mi",
    "load_timeseries_csv", "mase", "r_of_p", "read_heatmap_csv", "rolling_forecast",
    "select_spi_optimal", "spi", "split_train_test", "write_heatmap_csv", "write_timeseries_csv",
]
__version__ = "0.1.0"
