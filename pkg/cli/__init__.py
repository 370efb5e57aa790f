from .config import ExperimentConfig
from .commands import build_parser, run
