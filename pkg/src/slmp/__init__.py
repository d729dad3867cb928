"""Morphological perceptrons with dendrite computation."""
from .bench import BenchSpec, accuracy, run_bench, surface_grid
from .ccp import CcpConfig, TrainReport, train_kddccp, train_wdccp
from .data import Dataset, load_csv, make_blobs, make_moons, split, standardize
from .errors import InputError, TrainingError
from .greedy import train_greedy
from .lattice import SlmpModel, dendrite_hyperbox, dual_model, neuron_response, predict

__version__ = "0.1.0"

__all__ = [
    "BenchSpec", "CcpConfig", "Dataset", "InputError", "SlmpModel", "TrainReport", "TrainingError", "accuracy",
    "dendrite_hyperbox", "dual_model", "load_csv", "make_blobs", "make_moons", "neuron_response", "predict",
    "run_bench", "split", "standardize", "surface_grid", "train_greedy", "train_kddccp", "train_wdccp",
]
