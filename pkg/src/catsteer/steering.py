"""Steering-witness arithmetic shared by the coherent-cat and GHZ realisations.

The witnesses here are all of the same shape: Alice measures one of her spin
settings, Bob measures an observable on the cat-system, and the outcome-weighted
conditional variances of Bob's results (the *inference variances*) are compared
against the bound any local-hidden-state model must respect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

#: Guard band for declaring a violation, so ties at the product-state boundary
#: are not reported as steering.
VIOLATION_TOL = 1e-12

#: Heisenberg bound for X = (a + a^dag)/sqrt(2), P = i(a - a^dag)/sqrt(2).
QUADRATURE_BOUND = 0.5

_PROB_TOL = 1e-9


@dataclass(frozen=True)
class EnsembleEntry:
    setting: str
    outcome: int
    probability: float
    mean: float
    variance: float


@dataclass(frozen=True)
class ConditionalEnsemble:
    """Conditional statistics of one Bob observable, indexed by Alice's result."""

    entries: tuple[EnsembleEntry, ...]

    def __init__(self, entries: Iterable[EnsembleEntry]):
        entries = tuple(entries)
        if not entries:
            raise ValueError("ensemble needs at least one entry")
        for e in entries:
            if e.probability < 0:
                raise ValueError(f"negative probability {e.probability}")
            if e.variance < 0:
                raise ValueError(f"negative variance {e.variance}")
        totals: dict[str, float] = {}
        for e in entries:
            totals[e.setting] = totals.get(e.setting, 0.0) + e.probability
        for setting, total in totals.items():
            if abs(total - 1.0) > _PROB_TOL:
                raise ValueError(
                    f"probabilities for setting {setting!r} sum to {total}, not 1"
                )
        object.__setattr__(self, "entries", entries)

    @property
    def settings(self) -> set[str]:
        return {e.setting for e in self.entries}

    @classmethod
    def from_arrays(
        cls,
        setting: str,
        outcomes: Sequence[int],
        probabilities: Sequence[float],
        means: Sequence[float],
        variances: Sequence[float],
    ) -> "ConditionalEnsemble":
        return cls(
            EnsembleEntry(setting, int(o), float(p), float(m), float(v))
            for o, p, m, v in zip(outcomes, probabilities, means, variances)
        )


@dataclass(frozen=True)
class SteeringReport:
    """Outcome of a witness evaluation.

    ``margin`` is ``bound - lhs``; ``violated`` is true only when the margin
    exceeds :data:`VIOLATION_TOL`.
    """

    lhs: float
    bound: float
    violated: bool
    margin: float

    @classmethod
    def evaluate(cls, lhs: float, bound: float) -> "SteeringReport":
        if lhs < 0 or bound < 0:
            raise ValueError("witness sides must be non-negative")
        return cls(
            lhs=float(lhs),
            bound=float(bound),
            violated=bool(lhs < bound - VIOLATION_TOL),
            margin=float(bound - lhs),
        )

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "bound": self.bound,
            "violated": self.violated,
            "margin": self.margin,
        }


def inference_variance(ens: ConditionalEnsemble) -> float:
    """Outcome-weighted mean of the conditional variances for a single setting."""
    if len(ens.settings) != 1:
        raise ValueError(
            f"ensemble mixes settings {sorted(ens.settings)}; "
            "inference variance is defined per setting"
        )
    return math.fsum(e.probability * e.variance for e in ens.entries)


def product_witness(var_a: float, var_b: float, bound: float = QUADRATURE_BOUND) -> SteeringReport:
    """Product of inferred standard deviations against an uncertainty bound.

    Steering is certified when ``sqrt(var_a * var_b) < bound``.
    """
    if var_a < 0 or var_b < 0 or bound < 0:
        raise ValueError(
            f"product_witness needs non-negative inputs, got {var_a}, {var_b}, {bound}"
        )
    return SteeringReport.evaluate(math.sqrt(var_a * var_b), bound)


def falsifiability_2b(Delta: float, delta: float, c: float = QUADRATURE_BOUND) -> bool:
    """Whether the cat paradox can still be signified under coarse locality.

    With indeterminacy ``Delta`` allowed for X and ``delta`` for P, and an
    uncertainty relation ``dX dP >= c``, a signature survives only while
    ``Delta * delta < c``.
    """
    for name, value in (("Delta", Delta), ("delta", delta), ("c", c)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    return Delta * delta < c
