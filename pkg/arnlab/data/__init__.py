"""Datasets: interchange CSV, preprocessing, splits and the pendulum generator."""

from arnlab.data.csv_io import DatasetSchema, load_csv, save_csv
from arnlab.data.dataset import Dataset, Scaling, SplitDataset
from arnlab.data.pendulum import gen_double_pendulum, pendulum_energy
from arnlab.data.preprocess import preprocess
from arnlab.data.snapshot import load_dataset
from arnlab.data.split import split

__all__ = [
    "Dataset",
    "DatasetSchema",
    "Scaling",
    "SplitDataset",
    "gen_double_pendulum",
    "load_csv",
    "load_dataset",
    "pendulum_energy",
    "preprocess",
    "save_csv",
    "split",
]
