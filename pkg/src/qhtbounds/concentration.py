"""Martingale concentration bounds and a seeded Monte Carlo harness.

The bound evaluators are plain formulas; the harness estimates tail
frequencies of small bounded-increment models with a counter-based generator
so that a (seed, model, n, trials) tuple always reproduces the same numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .divergences import binary_kl
from .errors import DomainError


def azuma_tail(alpha: float, d: Sequence[float]) -> float:
    """Bounded-difference supermartingale tail exp(-alpha^2 / (2 sum d_k^2))."""
    if alpha < 0:
        raise DomainError(f"deviation must be nonnegative, got {alpha}")
    if alpha == 0.0:
        return 1.0
    d = np.asarray(d, dtype=float)
    if (d < 0).any():
        raise DomainError("difference bounds must be nonnegative")
    s = float((d**2).sum())
    if s == 0.0:
        return 0.0
    return min(1.0, math.exp(-(alpha**2) / (2.0 * s)))


def improved_azuma_tail(kappa: float, n: int, d: float, nu: float) -> float:
    """Variance-aware supermartingale tail exp(-n KL((d+g)/(1+g) || g/(1+g))).

    Requires 0 < nu < d; kappa is the per-step deviation so the event is a
    total deviation of kappa * n. A relative deviation above the difference
    bound has probability zero and 0 is returned.
    """
    if not 0.0 < nu < d:
        raise DomainError(f"need 0 < nu < d, got nu={nu}, d={d}")
    if kappa < 0:
        raise DomainError(f"deviation must be nonnegative, got {kappa}")
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    gamma = (nu / d) ** 2
    delta = kappa / d
    if delta > 1.0:
        return 0.0
    p = (delta + gamma) / (1.0 + gamma)
    q = gamma / (1.0 + gamma)
    return min(1.0, math.exp(-n * binary_kl(p, q)))


def kearns_saul_constant(a: float, b: float, p: float) -> float:
    """Sub-Gaussian proxy (1-2p)(b-a)^2 / (4 log((1-p)/p)), continuous at 1/2.

    This sharpens the Hoeffding constant (b-a)^2/8 for a bounded variable on
    [a, b] whose mean sits at fraction p of the interval; the limits at p in
    {0, 1} vanish.
    """
    if a == b:
        raise DomainError("interval endpoints must be distinct")
    if not -1e-12 <= p <= 1.0 + 1e-12:
        raise DomainError(f"mean fraction must lie in [0, 1], got {p}")
    p = min(max(p, 0.0), 1.0)
    width_sq = (b - a) ** 2
    if p == 0.0 or p == 1.0:
        return 0.0
    if abs(p - 0.5) < 1e-7:
        return width_sq / 8.0
    return (1.0 - 2.0 * p) * width_sq / (4.0 * math.log((1.0 - p) / p))


def kearns_saul_tail(alpha: float, n: int, c: Sequence[float]) -> float:
    """Lower tail exp(-alpha^2 n / (4 sum c_k)) for independent bounded sums."""
    if alpha < 0:
        raise DomainError(f"deviation must be nonnegative, got {alpha}")
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if alpha == 0.0:
        return 1.0
    s = float(np.asarray(c, dtype=float).sum())
    if s < 0:
        raise DomainError("constants must sum to a nonnegative value")
    if s == 0.0:
        return 0.0
    return min(1.0, math.exp(-(alpha**2) * n / (4.0 * s)))


def bennett_h(u: float) -> float:
    """(1+u) log(1+u) - u for u >= 0, series-evaluated near zero."""
    if u < 0:
        raise DomainError(f"bennett_h needs u >= 0, got {u}")
    if u < 1e-5:
        return u**2 / 2.0 - u**3 / 6.0 + u**4 / 12.0 - u**5 / 20.0
    return (1.0 + u) * math.log1p(u) - u


@dataclass(frozen=True)
class MartingaleModel:
    """Bounded-increment model: values, probabilities and bound parameters."""

    name: str
    values: tuple[float, ...]
    probs: tuple[float, ...]
    supermartingale: bool
    bounded: bool = True

    @property
    def step_mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    @property
    def center_per_step(self) -> float:
        # Supermartingale deviations are measured from the start, not the mean.
        return 0.0 if self.supermartingale else self.step_mean

    @property
    def azuma_d(self) -> float:
        ref = 0.0 if self.supermartingale else self.step_mean
        return float(max(abs(v - ref) for v in self.values))

    @property
    def improved_params(self) -> tuple[float, float]:
        m = self.step_mean
        d = float(max(v - m for v in self.values))
        nu = math.sqrt(float(np.dot((np.asarray(self.values) - m) ** 2, self.probs)))
        return d, nu

    @property
    def ks_params(self) -> tuple[float, float, float]:
        a, b = min(self.values), max(self.values)
        p = (self.step_mean - a) / (b - a)
        return a, b, p

    @property
    def sides(self) -> tuple[str, ...]:
        return ("upper",) if self.supermartingale else ("upper", "lower")


MODELS: dict[str, MartingaleModel] = {
    # fair +-1 walk
    "rademacher": MartingaleModel("rademacher", (-1.0, 1.0), (0.5, 0.5), False),
    # centered skewed i.i.d. steps, conditional variance well below the range
    "skewed": MartingaleModel("skewed", (-0.1, 0.9), (0.9, 0.1), False),
    # plain Bernoulli(0.9) partial sums, natural lower-tail example
    "bernoulli09": MartingaleModel("bernoulli09", (0.0, 1.0), (0.1, 0.9), False),
    # +-1 walk with downward drift, a bona fide supermartingale
    "drift_walk": MartingaleModel("drift_walk", (-1.0, 1.0), (0.55, 0.45), True),
    # rejected by the harness: increments are unbounded
    "gaussian": MartingaleModel("gaussian", (), (), False, bounded=False),
}


@dataclass(frozen=True)
class MCResult:
    model: str
    n: int
    trials: int
    seed: int
    side: str
    threshold: float
    frequency: float
    stderr: float


def mc_martingale_harness(
    model: str | MartingaleModel,
    n: int,
    trials: int,
    threshold: float,
    seed: int,
    side: str = "upper",
) -> MCResult:
    """Empirical tail frequency of a bounded-increment model with its standard error.

    ``side="upper"`` estimates P(S_n - center >= threshold), ``side="lower"``
    estimates P(S_n - center <= -threshold), where the center is the running
    mean for martingale models and the starting point for supermartingales.
    Results are reproducible per (seed, model, n, trials).
    """
    spec = MODELS.get(model) if isinstance(model, str) else model
    if spec is None:
        raise DomainError(f"unknown model {model!r}; choose from {sorted(MODELS)}")
    if not spec.bounded:
        raise DomainError(f"model {spec.name!r} has unbounded increments and is rejected")
    if side not in ("upper", "lower"):
        raise DomainError(f"side must be 'upper' or 'lower', got {side!r}")
    if side not in spec.sides:
        raise DomainError(f"model {spec.name!r} only supports sides {spec.sides}")
    if n < 1 or trials < 1:
        raise DomainError("n and trials must be positive")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    u = rng.random((trials, n))
    edges = np.cumsum(spec.probs)[:-1]
    steps = np.asarray(spec.values)[np.searchsorted(edges, u)]
    sums = steps.sum(axis=1) - n * spec.center_per_step
    if side == "upper":
        hits = sums >= threshold
    else:
        hits = sums <= -threshold
    freq = float(hits.mean())
    stderr = math.sqrt(freq * (1.0 - freq) / trials)
    return MCResult(spec.name, n, trials, int(seed), side, float(threshold), freq, stderr)


def model_bounds(spec: MartingaleModel, n: int, threshold: float, side: str) -> dict[str, float]:
    """Evaluate every applicable concentration bound at a deviation threshold."""
    out: dict[str, float] = {}
    if threshold < 0:
        return {"azuma": 1.0, "improved_azuma": 1.0, "kearns_saul": 1.0}
    out["azuma"] = azuma_tail(threshold, [spec.azuma_d] * n)
    d, nu = spec.improved_params
    if 0.0 < nu < d:
        out["improved_azuma"] = improved_azuma_tail(threshold / n, n, d, nu)
    if not spec.supermartingale:
        a, b, p = spec.ks_params
        c = kearns_saul_constant(a, b, p)
        # the constant is invariant under reflecting the interval, so the
        # same value serves both tails of a centered independent sum
        out["kearns_saul"] = kearns_saul_tail(threshold / math.sqrt(n), n, [c] * n)
    return out
