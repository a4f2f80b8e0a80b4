"""Coarse locality: smear Bob's P statistics by a width ``delta`` and watch the witness die.

Allowing Alice's measurement to move Bob's P value by up to ``delta`` is modelled
as convolving Bob's conditional P densities with a kernel of width ``delta``.
X is the macroscopic (alive/dead) variable and is left unsmeared.

With a Gaussian kernel the added variance is exactly ``delta**2``, so the
quadrature witness stops violating once ``delta**2`` covers the fringe-induced
variance deficit ``2 alpha^2 exp(-4 alpha^2)``:

    delta* = sqrt(2) alpha exp(-2 alpha^2)

:func:`critical_delta` finds the same point by bisection on numerically
convolved densities, independent of that formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .analytic_cat import (
    POINTS_PER_FRINGE,
    CatState,
    ConditionalDist,
    InferenceVariances,
    QuadratureGrid,
    check_fringe_resolution,
    conditional_dist,
    fringe_period,
    inference_variances,
)
from .errors import GridResolutionError, NoSignatureError
from .ghz_sim import ghz_steering_witness
from .steering import QUADRATURE_BOUND, product_witness

#: Kernel width must span at least this many grid steps (sd for gaussian, full width for box).
STEPS_PER_WIDTH = 4

#: Largest P grid the numeric route builds before giving up.
MAX_GRID_POINTS = 4_000_000

P_HALF_WIDTH = 8.0


@dataclass(frozen=True)
class Kernel:
    kind: Literal["gaussian", "box"]
    width: float

    def __post_init__(self):
        if self.kind not in ("gaussian", "box"):
            raise ValueError(f"kernel kind must be 'gaussian' or 'box', got {self.kind!r}")
        if not self.width > 0:
            raise ValueError(f"kernel width must be positive, got {self.width}")

    def weights(self, step: float) -> np.ndarray:
        """Discrete kernel on a grid of spacing ``step``, summing to 1."""
        if step > self.width / STEPS_PER_WIDTH * (1 + 1e-9):
            raise GridResolutionError(
                f"grid step {step:g} cannot resolve a {self.kind} kernel of width {self.width:g}; "
                f"need step <= {self.width / STEPS_PER_WIDTH:g}"
            )
        if self.kind == "gaussian":
            m = int(math.ceil(8 * self.width / step))
            x = step * np.arange(-m, m + 1)
            w = np.exp(-0.5 * (x / self.width) ** 2)
        else:
            m = int(math.floor(0.5 * self.width / step))
            w = np.ones(2 * m + 1)
        return w / w.sum()


def convolve(dist: ConditionalDist, k: Kernel) -> ConditionalDist:
    """Smear ``dist`` with ``k``; the result is renormalised to unit integral."""
    if dist.basis == "P" and dist.alpha is not None:
        check_fringe_resolution(dist.grid, dist.alpha)
    w = k.weights(dist.grid.step)
    if w.size > dist.densities.size:
        raise GridResolutionError("kernel is wider than the grid")
    out = np.convolve(dist.densities, w, mode="same")
    smeared = replace(dist, densities=out)
    return replace(smeared, densities=out / smeared.integral())


def p_grid_for(cat: CatState, delta: float) -> QuadratureGrid:
    """P grid resolving both the fringes and a Gaussian of sd ``delta``."""
    step = min(0.01, fringe_period(cat.alpha) / POINTS_PER_FRINGE, delta / STEPS_PER_WIDTH)
    if 2 * P_HALF_WIDTH / step > MAX_GRID_POINTS:
        raise GridResolutionError(
            f"delta={delta:g} needs a P grid of {2 * P_HALF_WIDTH / step:.3g} points"
        )
    return QuadratureGrid.centered(P_HALF_WIDTH, step)


def coarse_inference_variances(
    cat: CatState, delta: float, kind: Literal["gaussian", "box"] = "gaussian"
) -> InferenceVariances:
    """Inference variances after smearing Bob's P conditionals by ``delta``.

    Var_inf X is the unsmeared 1/2; Var_inf P is integrated numerically from the
    convolved densities.
    """
    k = Kernel(kind, delta)
    grid = p_grid_for(cat, delta if kind == "gaussian" else delta / 2)
    var_p = 0.0
    for o in (1, -1):
        d = convolve(conditional_dist(cat, "X", o, grid), k)
        var_p += 0.5 * d.moments().variance
    return InferenceVariances(inference_variances(cat).var_inf_x, var_p)


def coarse_margin(cat: CatState, delta: float) -> float:
    """Witness margin ``1/2 - dX_inf dP_inf`` under Gaussian smearing ``delta``."""
    v = coarse_inference_variances(cat, delta)
    return product_witness(v.var_inf_x, v.var_inf_p, QUADRATURE_BOUND).margin


def critical_delta_closed_form(alpha: float) -> float:
    """``sqrt(2) alpha exp(-2 alpha^2)``: smallest Gaussian width that erases the violation."""
    return math.sqrt(2.0) * alpha * math.exp(-2.0 * alpha * alpha)


def critical_delta(cat: CatState, tol: float = 1e-10, max_iter: int = 200) -> float:
    """Bisection for the smearing width where the quadrature witness margin reaches 0.

    The bracket starts at ``delta = 1`` and halves downward until a violating
    width is found. The root is located on the continuous margin, not on the
    guarded ``violated`` flag, so the result is not shifted by the guard band.
    """
    if cat.is_product:
        raise NoSignatureError("alpha = 0 is a product state; nothing to smear away")
    hi = 1.0
    if coarse_margin(cat, hi) > 0:
        raise NoSignatureError(f"witness still violated at delta={hi}")
    lo = hi / 2
    while True:
        try:
            m = coarse_margin(cat, lo)
        except GridResolutionError as exc:
            raise NoSignatureError(
                f"no violation resolvable for alpha={cat.alpha:g} down to delta={lo:g}"
            ) from exc
        if m > 0:
            break
        hi, lo = lo, lo / 2
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if coarse_margin(cat, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ghz_unit_check(n: int, smearing: float = 1.0) -> bool:
    """Does the GHZ witness survive outcome smearing of ``smearing`` spin units?

    Each inference variance gets a floor of ``smearing**2``.
    """
    return ghz_steering_witness(n, smearing=smearing).violated
