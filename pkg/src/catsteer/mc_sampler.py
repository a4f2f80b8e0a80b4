"""Finite-shot simulated experiments and witness estimation.

Randomness comes from numpy's ``Philox`` counter-based generator. Each block of
shots for each plan entry gets its own stream, derived from
``SeedSequence(seed, spawn_key=(plan_index, block_index))``. Block results do not
depend on how many blocks exist or in which order they run.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import ghz_sim
from .analytic_cat import SQRT2, CatState, QuadratureGrid, cond_x_density
from .errors import InsufficientDataError
from .steering import QUADRATURE_BOUND, VIOLATION_TOL

BLOCK_SIZE = 8192
MIN_CELL = 10
DEFAULT_RESAMPLES = 200

COHERENT_PLAN = (("Z", "X", 0.5), ("X", "P", 0.5))


def ghz_plan(n: int) -> tuple[tuple[str, str, float], ...]:
    """Z infers S_Z; of X and Y, the one that predicts Pr_Y depends on the parity of n - 1."""
    pry, pryj = ("X", "Y") if (n - 1) % 2 == 0 else ("Y", "X")
    return (("Z", "SZ", 1 / 3), (pry, "PRY", 1 / 3), (pryj, "PRYJ", 1 / 3))


@dataclass(frozen=True)
class SampleConfig:
    shots: int
    seed: int
    settings_plan: tuple[tuple[str, str, float], ...] = COHERENT_PLAN

    def __post_init__(self):
        if self.shots <= 0:
            raise ValueError(f"shots must be positive, got {self.shots}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        total = math.fsum(f for _, _, f in self.settings_plan)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"plan fractions sum to {total}, not 1")

    def shot_counts(self) -> list[int]:
        """Shots per plan entry; rounding remainders go to the largest fractional parts."""
        raw = [f * self.shots for _, _, f in self.settings_plan]
        counts = [int(math.floor(r)) for r in raw]
        short = self.shots - sum(counts)
        order = sorted(range(len(raw)), key=lambda i: (counts[i] - raw[i], i))
        for i in order[:short]:
            counts[i] += 1
        return counts


@dataclass(frozen=True)
class SampleRecord:
    alice_setting: str
    alice_outcome: int
    bob_observable: str
    bob_value: float


@dataclass(frozen=True)
class EstimateReport:
    witness_lhs: float
    bound: float
    stderr_lhs: float
    violated_at_3sigma: bool

    def to_dict(self) -> dict:
        return {
            "witness_lhs": self.witness_lhs,
            "bound": self.bound,
            "stderr_lhs": self.stderr_lhs,
            "violated_at_3sigma": self.violated_at_3sigma,
        }


def _block_rngs(seed: int, plan_index: int, count: int):
    for b, start in enumerate(range(0, count, BLOCK_SIZE)):
        ss = np.random.SeedSequence(seed, spawn_key=(plan_index, b))
        yield np.random.Generator(np.random.Philox(ss)), min(BLOCK_SIZE, count - start)


class _XSampler:
    """Inverse-CDF sampling of the X hills from a tabulated CDF."""

    def __init__(self, cat: CatState, step: float = 1e-3):
        self.cat = cat
        c = SQRT2 * cat.alpha
        self.grid = QuadratureGrid.centered(c + 9.0, step).points
        self.cdf = {}
        for o in (1, -1):
            dens = cond_x_density(cat, o, self.grid)
            cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * step)])
            self.cdf[o] = cdf / cdf[-1]

    def __call__(self, rng, outcome: int, size: int) -> np.ndarray:
        return np.interp(rng.random(size), self.cdf[outcome], self.grid)


def _sample_p(rng, cat: CatState, outcome: int, size: int) -> np.ndarray:
    """Rejection sampling: propose from exp(-p^2)/sqrt(pi), accept w.p. (1 +- sin)/2."""
    k = 2.0 * SQRT2 * cat.alpha
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        prop = rng.normal(0.0, math.sqrt(0.5), 2 * need + 16)
        acc = rng.random(prop.size) < 0.5 * (1.0 + outcome * np.sin(k * prop))
        take = prop[acc][:need]
        out[filled:filled + take.size] = take
        filled += take.size
    return out


def sample_coherent_cat(cat: CatState, cfg: SampleConfig) -> list[SampleRecord]:
    """Simulated shots for the coherent cat; Alice's outcomes are +-1 with probability 1/2."""
    xs = None
    records: list[SampleRecord] = []
    for i, ((setting, obs, _), count) in enumerate(zip(cfg.settings_plan, cfg.shot_counts())):
        if (setting, obs) not in (("Z", "X"), ("X", "P")):
            raise ValueError(f"unsupported coherent plan entry {setting}/{obs}")
        for rng, size in _block_rngs(cfg.seed, i, count):
            outcomes = np.where(rng.random(size) < 0.5, 1, -1)
            values = np.empty(size)
            for o in (1, -1):
                mask = outcomes == o
                if obs == "X":
                    xs = xs or _XSampler(cat)
                    values[mask] = xs(rng, o, int(mask.sum()))
                else:
                    values[mask] = _sample_p(rng, cat, o, int(mask.sum()))
            records.extend(
                SampleRecord(setting, int(o), obs, float(v)) for o, v in zip(outcomes, values)
            )
    return records


def _ghz_observable_probs(cond: ghz_sim.QubitState, obs: str):
    """(values, probabilities) of Bob's observable on ``cond``."""
    if obs == "SZ":
        dist = ghz_sim.collective_sz_dist(cond)
        return dist.support, dist.probabilities
    if obs == "PRY":
        mean = ghz_sim.pr_y(cond).mean
    elif obs.startswith("PRYJ"):
        J = int(obs[4:]) if len(obs) > 4 else 1
        mean = ghz_sim.pr_y_J(cond, J)
    else:
        raise ValueError(f"unknown GHZ observable {obs!r}")
    p_plus = min(max(0.5 * (1 + mean), 0.0), 1.0)
    return np.array([1.0, -1.0]), np.array([p_plus, 1 - p_plus])


def sample_ghz(n: int, cfg: SampleConfig) -> list[SampleRecord]:
    """Simulated shots for GHZ(n): Alice measures qubit n, Bob a collective observable.

    Observables are ``SZ`` (collective spin, half units), ``PRY`` (product of
    sigma_Y) and ``PRYJ<k>`` (the ``k``-th mixed product; bare ``PRYJ`` means
    ``k = 1``).
    """
    state = ghz_sim.build_ghz(n)
    records: list[SampleRecord] = []
    for i, ((setting, obs, _), count) in enumerate(zip(cfg.settings_plan, cfg.shot_counts())):
        branches = {}
        for o in (1, -1):
            p, cond = ghz_sim.alice_condition(state, setting, o)
            branches[o] = (p, *_ghz_observable_probs(cond, obs))
        p_plus = branches[1][0]
        for rng, size in _block_rngs(cfg.seed, i, count):
            outcomes = np.where(rng.random(size) < p_plus, 1, -1)
            values = np.empty(size)
            for o in (1, -1):
                mask = outcomes == o
                _, support, probs = branches[o]
                values[mask] = rng.choice(support, size=int(mask.sum()), p=probs)
            records.extend(
                SampleRecord(setting, int(o), obs, float(v)) for o, v in zip(outcomes, values)
            )
    return records


def _group(records: Iterable[SampleRecord]):
    cells = defaultdict(lambda: ([], []))
    for r in records:
        outs, vals = cells[(r.alice_setting, r.bob_observable)]
        outs.append(r.alice_outcome)
        vals.append(r.bob_value)
    return {k: (np.array(o), np.array(v)) for k, (o, v) in cells.items()}


def _inferred_var(outcomes: np.ndarray, values: np.ndarray) -> float:
    total = 0.0
    n = outcomes.size
    for o in (1, -1):
        v = values[outcomes == o]
        if v.size < MIN_CELL:
            raise InsufficientDataError(f"only {v.size} records for Alice outcome {o}")
        total += v.size / n * v.var(ddof=1)
    return total


def _inferred_abs_mean(outcomes: np.ndarray, values: np.ndarray) -> float:
    total = 0.0
    n = outcomes.size
    for o in (1, -1):
        v = values[outcomes == o]
        if v.size < MIN_CELL:
            raise InsufficientDataError(f"only {v.size} records for Alice outcome {o}")
        total += v.size / n * abs(v.mean())
    return total


def _witness_from_cells(cells, n_bob: int | None = None) -> tuple[float, float]:
    """Plug-in (lhs, bound) for whichever realisation the cells describe."""
    if ("Z", "X") in cells and ("X", "P") in cells:
        vx = _inferred_var(*cells[("Z", "X")])
        vp = _inferred_var(*cells[("X", "P")])
        return math.sqrt(vx * vp), QUADRATURE_BOUND
    sz = cells.get(("Z", "SZ"))
    if sz is None:
        raise InsufficientDataError("records need Z/X and X/P cells, or a Z/SZ cell for GHZ")
    pry = [k for k in cells if k[1] == "PRY"]
    pryj = [k for k in cells if k[1].startswith("PRYJ")]
    if len(pry) != 1 or not pryj:
        raise InsufficientDataError("GHZ records need one PRY cell and at least one PRYJ cell")
    if len({k[0] for k in pryj}) != 1:
        raise InsufficientDataError("all PRYJ cells must share one Alice setting")
    vz = _inferred_var(*sz)
    vy = _inferred_var(*cells[pry[0]])
    if n_bob is None:
        n_bob = int(round(2 * np.abs(sz[1]).max()))
    # sum_J <Pr_Y(J)>_o estimated as n_bob times the mean over the sampled J cells
    outs = np.concatenate([cells[k][0] for k in pryj])
    bound = 0.0
    for o in (1, -1):
        means = []
        for k in pryj:
            v = cells[k][1][cells[k][0] == o]
            if v.size < MIN_CELL:
                raise InsufficientDataError(f"only {v.size} records for Alice outcome {o} in {k}")
            means.append(v.mean())
        bound += np.mean(outs == o) * abs(n_bob * float(np.mean(means))) / 2.0
    return math.sqrt(vz * vy), bound


def estimate_witness(
    records: Sequence[SampleRecord],
    resamples: int = DEFAULT_RESAMPLES,
    seed: int = 0,
    n_bob: int | None = None,
) -> EstimateReport:
    """Plug-in witness with a bootstrap standard error.

    Bootstrap resamples are drawn within each (setting, observable) cell so the
    measurement plan stays fixed.
    """
    cells = _group(records)
    lhs, bound = _witness_from_cells(cells, n_bob)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(0xB007,))))
    keys = sorted(cells)
    boots = np.empty(resamples)
    for b in range(resamples):
        resampled = {}
        for k in keys:
            o, v = cells[k]
            idx = rng.integers(0, o.size, o.size)
            resampled[k] = (o[idx], v[idx])
        boots[b] = _witness_from_cells(resampled, n_bob)[0]
    stderr = float(boots.std(ddof=1)) if resamples > 1 else 0.0
    return EstimateReport(
        witness_lhs=float(lhs),
        bound=float(bound),
        stderr_lhs=stderr,
        violated_at_3sigma=bool(lhs + 3 * stderr < bound - VIOLATION_TOL),
    )
