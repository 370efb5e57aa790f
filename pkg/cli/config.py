from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from classifier.iscb import RTILDE, VARIANTS
from data.idx import data_dir, mnist_available
from utils.exceptions import ConfigError

EXPERIMENTS = ("sandwich", "mnist", "rhat-vs-rtilde", "point-mass", "symmetric")
THEORY_RUNS = ("bounds", "moments", "separation")

# Per-experiment defaults for fields left unset on the command line
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "sandwich": {"m": 100, "L": 1, "K": 7},
    "mnist": {"m": 500, "L": 10, "K": 4},
    "rhat-vs-rtilde": {"m": 500, "L": 16, "K": 4},
    "point-mass": {"m": 50, "L": 1, "K": 5},
    "symmetric": {"m": 40, "L": 1, "K": 1, "trials": 50},
    "preprocess": {},
    "bounds": {"samples": 100_000},
    "moments": {"samples": 1_000_000},
    "separation": {},
}


@dataclass
class ExperimentConfig:
    """Everything one experiment or theory run depends on.

    Trial t uses seed seeds[t]; seeds default to seed_base + t.
    """
    name: str
    m: Optional[int] = None
    L: Optional[int] = None
    K: Optional[int] = None
    variant: str = RTILDE
    seed_base: int = 0
    trials: Optional[int] = None
    seeds: Optional[List[int]] = None
    out_dir: Path = Path("results")
    workers: int = 1
    dataset: Optional[str] = None
    check: bool = False
    # sandwich
    balanced: bool = False
    n_blue: int = 200
    n_red: int = 400
    # mnist
    train_per_class: int = 1000
    test_per_class: int = 100
    data_dir: Optional[Path] = None
    # point masses / symmetric / arcs
    count1: int = 8
    count2: int = 4
    angle12: float = np.pi / 6
    n: int = 10
    spread: float = np.pi / 8
    affine: bool = False
    arc_n: int = 200
    # theory
    samples: Optional[int] = None

    def __post_init__(self):
        for key, value in DEFAULTS.get(self.name, {}).items():
            if getattr(self, key) is None:
                setattr(self, key, value)
        if self.trials is None:
            self.trials = 10 if self.name in EXPERIMENTS else 1
        if self.seeds is None:
            self.seeds = [self.seed_base + t for t in range(self.trials)]
        self.out_dir = Path(self.out_dir)
        if self.data_dir is None:
            self.data_dir = data_dir()
        self.data_dir = Path(self.data_dir)

    def validate(self) -> 'ExperimentConfig':
        if self.name not in EXPERIMENTS + THEORY_RUNS + ("preprocess",):
            raise ConfigError(f"Unknown experiment {self.name!r}")
        if self.trials < 1 or len(self.seeds) != self.trials:
            raise ConfigError(f"Need one seed per trial, got {len(self.seeds)} seeds for {self.trials} trials")
        if any(s < 0 for s in self.seeds):
            raise ConfigError("Seeds must be non-negative")
        for name in ("m", "L", "K", "samples"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"Unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.name == "sandwich" and (self.n_red % 2 or self.n_red < 2):
            raise ConfigError(f"The sandwich needs an even number of red points, got {self.n_red}")
        if self.name in ("mnist", "rhat-vs-rtilde"):
            if self.train_per_class < 1 or self.test_per_class < 1:
                raise ConfigError("Per-class sample sizes must be positive")
            if not mnist_available(self.data_dir):
                raise FileNotFoundError(f"MNIST IDX files not found in {self.data_dir}; run fetch-mnist first")
        if self.name == "point-mass":
            if min(self.count1, self.count2) < 1:
                raise ConfigError(f"Each point mass needs at least one copy, got {self.count1}, {self.count2}")
            if not 0 < self.angle12 < np.pi / 2:
                raise ConfigError(f"angle12 must lie in (0, pi/2), got {self.angle12}")
        if self.name == "symmetric" and self.m % 2:
            raise ConfigError(f"Mirrored hyperplanes come in pairs, m must be even, got {self.m}")
        if self.dataset is not None and not Path(self.dataset).exists():
            raise FileNotFoundError(f"Dataset {self.dataset} does not exist")
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["out_dir"] = str(self.out_dir)
        data["data_dir"] = str(self.data_dir)
        return data
