"""Closed-form score geometry and separation bounds for two-class data.

Everything here is exact arithmetic on the closed forms; the Monte Carlo
helpers (simulate_wedge, moment_report, bound_table) exist to check those
forms against direct simulation.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from utils.exceptions import ConfigError, UndefinedAngleError
from utils.logger import Logger
from utils.utils import STREAM_THEORY, derive_rng

logger = Logger.get_logger(__name__)

LN2 = np.log(2.0)
ANGLE_SAMPLES = 100_000
MOMENT_SAMPLES = 1_000_000
SIM_CHUNK = 50_000  # wedge draws per random substream
SIGMA_SLACK = 3.0

Pair = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class BoundConstants:
    C1: float
    C2: float
    C3: float
    C4: float


CONSTANTS = BoundConstants(
    C1=2 * LN2 - 1,
    C2=10 * LN2 ** 2 - 14 * LN2 + 5,
    C3=4 * (1 - LN2) * (3 * LN2 - 2),
    C4=-10 * LN2 ** 2 + 8 * LN2 - 2.0 / 3.0,
)


@dataclass(frozen=True)
class WedgeConfig:
    """Two classes in angular sectors of widths a1, a2 separated by a12.

    k1, k2 hyperplanes cut through the first and second sector, j separate them.
    """
    k1: int
    k2: int
    j: int
    a1: float = np.pi / 8
    a2: float = np.pi / 8
    a12: float = np.pi / 8

    def __post_init__(self):
        if min(self.k1, self.k2, self.j) < 0:
            raise ValueError(f"Hyperplane counts must be non-negative, got {self.k1}, {self.k2}, {self.j}")
        if min(self.a1, self.a2, self.a12) <= 0:
            raise ValueError("Wedge angles must be positive")

    def require_bound_setting(self):
        if not np.isclose(self.a1, self.a2):
            raise ConfigError(f"The separation bound assumes equal wedges, got a1={self.a1}, a2={self.a2}")
        if self.j < 1:
            raise ConfigError("The separation bound needs at least one separating hyperplane")


def angle(v1, v2) -> float:
    """Angle between two vectors in radians, clamped to [0, pi]"""
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 == 0 or n2 == 0:
        raise UndefinedAngleError("Angle with a zero vector is undefined")
    return float(np.arccos(np.clip(v1 @ v2 / (n1 * n2), -1.0, 1.0)))


def _angles(g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    """Row-wise angles of two (n, 2) arrays"""
    norms = np.linalg.norm(g1, axis=1) * np.linalg.norm(g2, axis=1)
    if np.any(norms == 0):
        raise UndefinedAngleError("Angle with a zero vector is undefined")
    return np.arccos(np.clip(np.sum(g1 * g2, axis=1) / norms, -1.0, 1.0))


def equal_point_mass_scores(j: int) -> Pair:
    """Unnormalized scores of two single-point classes separated by j hyperplanes"""
    if j < 0:
        raise ValueError(f"j must be non-negative, got {j}")
    return np.array([float(j), 0.0]), np.array([0.0, float(j)])


def _point_mass_vectors(separating: float, shared: float, a1: float, a2: float) -> Pair:
    if a1 <= 0 or a2 <= 0:
        raise ValueError(f"Class masses must be positive, got {a1}, {a2}")
    imbalance = abs(a1 - a2) / (a1 + a2) ** 2
    first = shared * a1 * imbalance
    second = shared * a2 * imbalance
    return np.array([separating + first, second]), np.array([first, separating + second])


def unequal_point_mass_scores(m: int, j: int, a1: float, a2: float) -> Pair:
    """Unnormalized scores of point masses with a1 and a2 points, j of m hyperplanes separating.

    The m - j non-separating hyperplanes put both classes in one pattern,
    which then scores each class by its share of the imbalance.
    """
    if not 0 <= j <= m:
        raise ValueError(f"Need 0 <= j <= m, got j={j}, m={m}")
    return _point_mass_vectors(float(j), float(m - j), a1, a2)


def separation_finite(m: int, j: int, a1: float, a2: float) -> float:
    """Angle between the two point-mass score vectors for a concrete m"""
    return angle(*unequal_point_mass_scores(m, j, a1, a2))


def second_iteration_separation(frac_j: float, c: float) -> float:
    """Angle between point-mass score vectors when a fraction frac_j of hyperplanes separates, c = a1/a2"""
    if not 0 <= frac_j <= 1:
        raise ValueError(f"frac_j must lie in [0, 1], got {frac_j}")
    if c <= 0:
        raise ValueError(f"Mass ratio must be positive, got {c}")
    return angle(*_point_mass_vectors(frac_j, 1.0 - frac_j, c, 1.0))


def separation_curve(fractions: Sequence[float], ratios: Sequence[float]) -> List[Dict]:
    """Table of second_iteration_separation over a (fraction, ratio) grid; undefined angles are NaN"""
    rows = []
    for c in ratios:
        for frac in fractions:
            try:
                value = second_iteration_separation(frac, c)
            except UndefinedAngleError:
                value = float("nan")
            rows.append({"c": float(c), "frac_j": float(frac), "angle": value})
    return rows


def symmetric_margin(n: int, j: int, s: Sequence[int]) -> float:
    """Score gap j + sum(((n - s_i) / (n + s_i))^2) of data mirrored about y = x"""
    s = np.asarray(s, dtype=np.float64).reshape(-1)
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if len(s) != j:
        raise ValueError(f"Expected {j} counts, got {len(s)}")
    if np.any((s < 0) | (s > n)):
        raise ValueError(f"Counts must lie in 0..{n}")
    return float(j + np.sum(((n - s) / (n + s)) ** 2))


def _inner_terms(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """u(1-u)/(1+u)^2 and (1-u)/(1+u)^2"""
    shared = (1.0 - u) / (1.0 + u) ** 2
    return u * shared, shared


def wedge_scores_from(u, u_prime, j: int) -> Pair:
    """Score vectors of the wedge boundary points for given hyperplane positions in each wedge"""
    u = np.asarray(u, dtype=np.float64)
    u_prime = np.asarray(u_prime, dtype=np.float64)
    k11, k12 = (t.sum() for t in _inner_terms(u))
    k22, k21 = (t.sum() for t in _inner_terms(u_prime))
    g1 = np.array([j + k11 + k21, k12 + k22])
    g2 = np.array([k11 + k21, j + k12 + k22])
    return g1, g2


def sample_wedge_scores(cfg: WedgeConfig, seed: int, u=None, u_prime=None) -> Pair:
    """One draw of the wedge boundary score vectors; u and u_prime may be forced"""
    rng = derive_rng(seed, STREAM_THEORY)
    if u is None:
        u = rng.random(cfg.k1)
    if u_prime is None:
        u_prime = rng.random(cfg.k2)
    if len(u) != cfg.k1 or len(u_prime) != cfg.k2:
        raise ValueError(f"Expected {cfg.k1} and {cfg.k2} positions, got {len(u)} and {len(u_prime)}")
    return wedge_scores_from(u, u_prime, cfg.j)


@dataclass(frozen=True)
class WedgeSums:
    """Per-draw sums of the inner terms over the hyperplanes of each wedge"""
    k11: np.ndarray
    k12: np.ndarray
    k21: np.ndarray
    k22: np.ndarray

    def scores(self, j: int) -> Pair:
        g1 = np.column_stack([j + self.k11 + self.k21, self.k12 + self.k22])
        g2 = np.column_stack([self.k11 + self.k21, j + self.k12 + self.k22])
        return g1, g2


@dataclass(frozen=True)
class WedgeSample:
    angles: np.ndarray
    cos_rhs: np.ndarray  # <g1, g2> / j^2, the upper bound on cos(angle)


def simulate_wedge_sums(k1: int, k2: int, n: int, seed: int, stream: int = 0) -> WedgeSums:
    """n independent draws of the wedge sums; chunk c of the draws uses substream (seed, stream, c)"""
    sums = {name: np.empty(n) for name in ("k11", "k12", "k21", "k22")}
    for chunk, start in enumerate(range(0, n, SIM_CHUNK)):
        stop = min(start + SIM_CHUNK, n)
        rng = derive_rng(seed, STREAM_THEORY, stream, chunk)
        u = rng.random((stop - start, k1))
        u_prime = rng.random((stop - start, k2))
        a, b = _inner_terms(u)
        c, d = _inner_terms(u_prime)
        sums["k11"][start:stop] = a.sum(axis=1)
        sums["k12"][start:stop] = b.sum(axis=1)
        sums["k22"][start:stop] = c.sum(axis=1)
        sums["k21"][start:stop] = d.sum(axis=1)
    return WedgeSums(**sums)


def simulate_wedge(cfg: WedgeConfig, n: int = ANGLE_SAMPLES, seed: int = 0,
                   sums: Optional[WedgeSums] = None) -> WedgeSample:
    """Angles and cosine upper bounds for n draws of the wedge model"""
    if cfg.j < 1:
        raise ConfigError("Wedge simulation needs j >= 1")
    if sums is None:
        sums = simulate_wedge_sums(cfg.k1, cfg.k2, n, seed)
    g1, g2 = sums.scores(cfg.j)
    return WedgeSample(_angles(g1, g2), np.sum(g1 * g2, axis=1) / cfg.j ** 2)


def expected_cos_bound(cfg: WedgeConfig) -> float:
    """Upper bound on E[cos(angle)] between the wedge boundary score vectors"""
    cfg.require_bound_setting()
    k1, k2, j = cfg.k1, cfg.k2, cfg.j
    c = CONSTANTS
    return (c.C1 * (k1 + k2) / j
            + (c.C2 * (k1 ** 2 + k2 ** 2) + c.C3 * k1 * k2 + c.C4 * (k1 + k2)) / j ** 2)


def theorem1_bound(cfg: WedgeConfig, a: float, clamp: bool = True) -> float:
    """Markov bound on P(angle <= a); clamped to 1 unless clamp=False"""
    if not 0 < a < np.pi / 2:
        raise ValueError(f"a must lie in (0, pi/2), got {a}")
    bound = expected_cos_bound(cfg) / np.cos(a)
    return min(bound, 1.0) if clamp else bound


def appendix_expectations() -> Tuple[float, float, float, float]:
    """E over u ~ U[0,1] of u(1-u)/(1+u)^2, (1-u)/(1+u)^2 and of their squares"""
    return (3 * LN2 - 2, 1 - LN2, 25.0 / 6.0 - 6 * LN2, 1.0 / 6.0)


INTEGRANDS = (
    ("u(1-u)/(1+u)^2", lambda u: u * (1 - u) / (1 + u) ** 2),
    ("(1-u)/(1+u)^2", lambda u: (1 - u) / (1 + u) ** 2),
    ("(u(1-u)/(1+u)^2)^2", lambda u: (u * (1 - u) / (1 + u) ** 2) ** 2),
    ("((1-u)/(1+u)^2)^2", lambda u: ((1 - u) / (1 + u) ** 2) ** 2),
)


def moment_report(samples: int = MOMENT_SAMPLES, seed: int = 0, k: int = 10) -> List[Dict]:
    """Closed form vs quadrature vs Monte Carlo for each integrand.

    Two extra rows check the assembled second moments of the sum over k
    hyperplanes of the first two integrands.
    """
    closed = appendix_expectations()
    u = derive_rng(seed, STREAM_THEORY).random(samples)
    rows = []
    for (name, f), exact in zip(INTEGRANDS, closed):
        quad, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
        values = f(u)
        rows.append({
            "quantity": f"E[{name}]",
            "closed_form": exact,
            "quadrature": quad,
            "mc_mean": float(values.mean()),
            "mc_stderr": float(values.std(ddof=1) / np.sqrt(samples)),
        })

    draws = max(samples // k, 2)
    grid = derive_rng(seed, STREAM_THEORY, 1).random((draws, k))
    for (name, f), mean, square in ((INTEGRANDS[0], closed[0], closed[2]), (INTEGRANDS[1], closed[1], closed[3])):
        exact = k * square + k * (k - 1) * mean ** 2
        values = f(grid).sum(axis=1) ** 2
        rows.append({
            "quantity": f"E[(sum_{k} {name})^2]",
            "closed_form": exact,
            "quadrature": float("nan"),
            "mc_mean": float(values.mean()),
            "mc_stderr": float(values.std(ddof=1) / np.sqrt(draws)),
        })
    return rows


def bound_table(ks: Sequence[int], js: Sequence[int], angles: Sequence[float],
                samples: int = ANGLE_SAMPLES, seed: int = 0) -> List[Dict]:
    """Bound vs empirical P(angle <= a) over a (k1 = k2 = k, j, a) grid.

    The wedge sums depend only on k, so they are simulated once per k and
    reused for every j and a.
    """
    rows = []
    for index, k in enumerate(ks):
        sums = simulate_wedge_sums(k, k, samples, seed, stream=index + 1)
        for j in js:
            cfg = WedgeConfig(k, k, j)
            sample = simulate_wedge(cfg, sums=sums)
            for a in angles:
                hits = sample.angles <= a
                p = float(hits.mean())
                stderr = float(np.sqrt(p * (1 - p) / samples))
                bound = theorem1_bound(cfg, a, clamp=False)
                rows.append({
                    "k": k, "j": j, "a": float(a),
                    "bound": bound,
                    "empirical": p,
                    "stderr": stderr,
                    "mean_angle": float(sample.angles.mean()),
                    "mean_cos_rhs": float(sample.cos_rhs.mean()),
                    "expected_cos_bound": expected_cos_bound(cfg),
                    "dominated": bool(p <= bound + SIGMA_SLACK * stderr),
                })
        logger.debug(f"Bound grid: finished k={k}")
    return rows
