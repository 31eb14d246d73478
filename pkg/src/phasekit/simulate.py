"""Monte Carlo estimate-and-score loop for the QFT-basis measurement.

Trials are split into fixed-size shards, each with its own stream spawned
from the root seed.  The shard layout does not depend on the thread count,
so a report is bit-identical for a given seed however it was executed.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cost import CostSpec, average_cost_fourier
from .povm import SeedMatrix, outcome_distribution
from .spectrum import CanonicalModel

TWO_PI = 2 * np.pi
SHARD_SIZE = 1 << 14
DEFAULT_MESH = 1 << 20
TRACE_HEADER = ("phi", "s", "phi_s", "cost")


@dataclass(frozen=True)
class PriorSpec:
    """Prior over the true phase.  ``support`` holds ``(phi, weight)`` pairs."""

    kind: str = "uniform"
    support: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("uniform", "point_mass", "discrete"):
            raise ValueError(f"unknown prior kind {self.kind!r}")
        support = tuple((float(p), float(w)) for p, w in self.support)
        if self.kind == "uniform":
            if support:
                raise ValueError("uniform prior takes no support")
        else:
            if not support:
                raise ValueError(f"{self.kind} prior needs support points")
            if self.kind == "point_mass" and len(support) != 1:
                raise ValueError("point_mass prior has exactly one support point")
            weights = np.array([w for _, w in support])
            if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
                raise ValueError("prior weights must be nonnegative and sum to 1")
        object.__setattr__(self, "support", support)

    @classmethod
    def point_mass(cls, phi: float) -> "PriorSpec":
        return cls("point_mass", ((phi, 1.0),))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(0, TWO_PI, size)
        phis = np.array([p for p, _ in self.support])
        if self.kind == "point_mass":
            return np.full(size, phis[0])
        weights = np.array([w for _, w in self.support])
        return phis[rng.choice(phis.size, size=size, p=weights)]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "support": [list(pw) for pw in self.support]}


@dataclass(frozen=True)
class TrialReport:
    trials: int
    mean_cost: float
    std_error: float
    outcome_histogram: tuple[int, ...]
    rng_seed: int
    uniformized: bool = False
    trace: tuple = field(default=(), repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean_cost": self.mean_cost,
            "std_error": self.std_error,
            "outcome_histogram": list(self.outcome_histogram),
            "rng_seed": self.rng_seed,
            "uniformized": self.uniformized,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for phi, s, phi_s, c in self.trace:
            writer.writerow([repr(float(phi)), int(s), repr(float(phi_s)), repr(float(c))])
        return buf.getvalue()


def _draw_outcomes(model: CanonicalModel, phis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    probs = outcome_distribution(model, phis)
    cdf = np.cumsum(probs, axis=-1)
    u = rng.random(np.shape(phis))
    s = np.sum(cdf < u[..., None] * cdf[..., -1:], axis=-1)
    return np.minimum(s, model.q - 1)


def sample_outcome(model: CanonicalModel, phi: float, rng: np.random.Generator) -> int:
    """Draw one QFT-basis outcome ``s`` at true phase ``phi``."""
    return int(_draw_outcomes(model, np.asarray([phi], dtype=float), rng)[0])


def _draw_offsets(rng: np.random.Generator, size: int, mesh: int | None) -> np.ndarray:
    if mesh is None:
        return rng.uniform(0, TWO_PI, size)
    return TWO_PI * rng.integers(0, mesh, size) / mesh


def uniformized_estimate(model: CanonicalModel, phi: float, rng: np.random.Generator,
                         mesh: int | None = DEFAULT_MESH, phi_r: float | None = None) -> float:
    """Estimate ``phi`` after shifting it by a random known offset.

    The offset is drawn from ``mesh`` equally spaced points (or continuously
    when ``mesh`` is None) unless ``phi_r`` pins it.
    """
    if phi_r is None:
        phi_r = float(_draw_offsets(rng, 1, mesh)[0])
    q = model.q
    s = sample_outcome(model, phi + phi_r, rng)
    return float(np.mod(TWO_PI * s / q - phi_r, TWO_PI))


def pointwise_cost(cost: CostSpec):
    """Bounded pointwise scoring function matching ``cost`` in expectation.

    The window series with ``c_l = sin(l eps) / (l pi)`` sums to
    ``(1 - eps/pi)/2 + indicator(|err| > eps)/2``; that step function is
    scored exactly instead of its truncated series.  Truncation at ``l < q``
    leaves the average under the QFT measurement unchanged, so both agree
    with the analytic cost.
    """
    if cost.label == "likelihood":
        raise ValueError("the likelihood cost is a delta function and cannot be simulated pointwise")
    if cost.label == "window":
        eps = cost.epsilon
        inside = (1 - eps / np.pi) / 2

        def window(err):
            r = np.mod(np.abs(err), TWO_PI)
            return np.where(np.minimum(r, TWO_PI - r) <= eps, inside, inside + 0.5)

        return window
    return cost.evaluate


def _run_shard(model, score, prior, n, seed_seq, uniformize, mesh, keep_trace):
    rng = np.random.default_rng(seed_seq)
    q = model.q
    phis = prior.sample(rng, n)
    offsets = _draw_offsets(rng, n, mesh) if uniformize else np.zeros(n)
    s = _draw_outcomes(model, phis + offsets, rng)
    estimates = np.mod(TWO_PI * s / q - offsets, TWO_PI)
    costs = score(estimates - phis)
    hist = np.bincount(s, minlength=q)
    trace = list(zip(phis, s, estimates, costs)) if keep_trace else []
    return float(np.sum(costs)), float(np.sum(costs ** 2)), hist, trace


def monte_carlo(model: CanonicalModel, cost: CostSpec, prior: PriorSpec | None = None,
                trials: int = 100_000, seed: int = 0, *, uniformize: bool = False,
                mesh: int | None = DEFAULT_MESH, threads: int = 1, trace: bool = False) -> TrialReport:
    """Simulate ``trials`` rounds of prepare, measure, and score.

    With ``uniformize`` each round goes through :func:`uniformized_estimate`.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    prior = prior or PriorSpec()
    score = pointwise_cost(cost)
    sizes = [SHARD_SIZE] * (trials // SHARD_SIZE)
    if trials % SHARD_SIZE:
        sizes.append(trials % SHARD_SIZE)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    args = [(model, score, prior, n, ss, uniformize, mesh, trace) for n, ss in zip(sizes, streams)]
    if threads > 1 and len(args) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda a: _run_shard(*a), args))
    else:
        results = [_run_shard(*a) for a in args]

    total = sum(r[0] for r in results)
    total_sq = sum(r[1] for r in results)
    hist = np.sum([r[2] for r in results], axis=0)
    mean = total / trials
    var = max(total_sq / trials - mean ** 2, 0.0)
    std_error = float(np.sqrt(var * trials / (trials - 1) / trials)) if trials > 1 else 0.0
    rows = tuple(row for r in results for row in r[3])
    return TrialReport(trials, float(mean), std_error, tuple(int(h) for h in hist), seed, uniformize, rows)


def analytic_uniform_cost(model: CanonicalModel, cost: CostSpec) -> float:
    """Exact uniform-prior average cost, the target the simulation estimates."""
    return average_cost_fourier(model, SeedMatrix.ones(model.q), cost)
