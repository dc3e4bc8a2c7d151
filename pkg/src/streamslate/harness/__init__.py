from .dataset import Dataset, load_dataset, tokenize
from .runner import SweepGrid, run, score_logs, sweep

__all__ = ["Dataset", "SweepGrid", "load_dataset", "run", "score_logs", "sweep", "tokenize"]
