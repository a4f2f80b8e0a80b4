"""Closed-form statistics of the coherent cat state.

The state is

    (e^{-i pi/4} |alpha>|up> + e^{+i pi/4} |-alpha>|down>) / sqrt(2)

with real ``alpha``, quadratures X = (a + a^dag)/sqrt(2) and
P = i(a - a^dag)/sqrt(2) so that dX dP >= 1/2.

Conditioned on Alice's sigma_Z result the oscillator is a coherent state, so X
is a Gaussian hill of variance 1/2 centred at +-sqrt(2) alpha. Conditioned on
her sigma_X result, P carries interference fringes of period pi/(sqrt(2) alpha):

    P_pm(p) = exp(-p^2) (1 pm sin(2 sqrt(2) alpha p)) / sqrt(pi)

Gaussian integrals of the fringe density give

    <P>_pm   = pm sqrt(2) alpha exp(-2 alpha^2)
    Var_pm P = 1/2 - 2 alpha^2 exp(-4 alpha^2)

The exponent is ``-4 alpha^2``. This was confirmed against direct numerical
integration of the density and against the truncated Fock-space oracle in
:mod:`catsteer.fock_oracle`; the tests in ``tests/test_analytic_cat.py`` pin it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import trapezoid

from .errors import GridResolutionError
from .steering import QUADRATURE_BOUND, SteeringReport, product_witness

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(math.pi)

#: Minimum number of grid points per P-fringe period.
POINTS_PER_FRINGE = 8

Basis = Literal["X", "P"]
Setting = Literal["Z", "X"]


@dataclass(frozen=True)
class CatState:
    """Coherent cat with real amplitude ``alpha``.

    ``alpha == 0`` is allowed and gives the product state vacuum x spin; ops
    that stay well defined there return coherent-vacuum statistics.
    """

    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be a finite non-negative real, got {self.alpha}")

    @property
    def is_product(self) -> bool:
        return self.alpha == 0.0

    @property
    def fringe_period(self) -> float:
        return fringe_period(self.alpha)


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform grid ``min, min + step, ...`` with ``floor((max-min)/step) + 1`` points."""

    min: float
    max: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if not self.min < self.max:
            raise ValueError(f"grid needs min < max, got {self.min}:{self.max}")

    @property
    def size(self) -> int:
        # small slack so that e.g. -5:5:0.01 yields 1001 points, not 1000
        return int(math.floor((self.max - self.min) / self.step + 1e-9)) + 1

    @property
    def points(self) -> np.ndarray:
        return self.min + self.step * np.arange(self.size)

    @classmethod
    def centered(cls, half_width: float, step: float) -> "QuadratureGrid":
        """Symmetric grid that contains 0 exactly (``j * step`` for integer ``j``)."""
        m = int(math.ceil(half_width / step))
        return cls(-m * step, m * step, step)

    @classmethod
    def parse(cls, text: str) -> "QuadratureGrid":
        """Parse ``"min:max:step"``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must look like min:max:step, got {text!r}")
        lo, hi, step = (float(s) for s in parts)
        return cls(lo, hi, step)


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"variance must be non-negative, got {self.variance}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class ConditionalDist:
    """A conditional density of Bob's quadrature tabulated on a grid."""

    basis: Basis
    alice_setting: Setting
    alice_outcome: int
    grid: QuadratureGrid
    densities: np.ndarray = field(repr=False)
    alpha: float | None = None

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    def integral(self) -> float:
        return float(trapezoid(self.densities, dx=self.grid.step))

    def moments(self) -> MomentSummary:
        """Mean and variance by trapezoid integration over the grid."""
        x = self.points
        norm = self.integral()
        mean = float(trapezoid(x * self.densities, dx=self.grid.step)) / norm
        var = float(trapezoid((x - mean) ** 2 * self.densities, dx=self.grid.step)) / norm
        return MomentSummary(mean, max(var, 0.0))


@dataclass(frozen=True)
class ElementOfRealityState:
    """Hidden state ``(lambda_z, lambda_x)`` fixing the X hill and the P fringe pattern."""

    lambda_z: int
    lambda_x: int

    def __post_init__(self):
        if self.lambda_z not in (-1, 1) or self.lambda_x not in (-1, 1):
            raise ValueError(f"lambdas must be +-1, got ({self.lambda_z}, {self.lambda_x})")

    @classmethod
    def all(cls) -> list["ElementOfRealityState"]:
        return [cls(z, x) for z in (1, -1) for x in (-1, 1)]


@dataclass(frozen=True)
class InferenceVariances:
    var_inf_x: float
    var_inf_p: float


def _check_outcome(outcome: int) -> int:
    if outcome not in (-1, 1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome}")
    return int(outcome)


def fringe_period(alpha: float) -> float:
    """Spacing of the P fringes, ``pi / (sqrt(2) alpha)``; infinite at alpha = 0."""
    return math.inf if alpha == 0 else math.pi / (SQRT2 * alpha)


def check_fringe_resolution(grid: QuadratureGrid, alpha: float) -> None:
    """Raise :class:`GridResolutionError` unless ``grid`` samples every fringe 8 times."""
    limit = fringe_period(alpha) / POINTS_PER_FRINGE
    if grid.step > limit * (1 + 1e-9):
        raise GridResolutionError(
            f"P grid step {grid.step:g} aliases fringes at alpha={alpha:g}; "
            f"need step <= {limit:.6g} (period/{POINTS_PER_FRINGE})"
        )


def default_x_grid(cat: CatState) -> QuadratureGrid:
    """X grid spanning both hills with 8 units of margin."""
    half = SQRT2 * cat.alpha + 8.0
    step = 0.01 * min(1.0, 1.0 / cat.alpha) if cat.alpha > 0 else 0.01
    return QuadratureGrid.centered(half, step)


def default_p_grid(cat: CatState, half_width: float = 8.0) -> QuadratureGrid:
    """P grid of half width 8 resolving the fringes; step never above 0.01."""
    step = min(0.01, fringe_period(cat.alpha) / POINTS_PER_FRINGE)
    return QuadratureGrid.centered(half_width, step)


def cond_x_density(cat: CatState, outcome: int, x):
    """Density of X given Alice's sigma_Z result ``outcome``."""
    s = _check_outcome(outcome)
    x = np.asarray(x, dtype=float)
    out = np.exp(-((x - s * SQRT2 * cat.alpha) ** 2)) / SQRT_PI
    return out if out.ndim else float(out)


def cond_p_density(cat: CatState, outcome: int, p):
    """Density of P given Alice's sigma_X result ``outcome``."""
    s = _check_outcome(outcome)
    p = np.asarray(p, dtype=float)
    out = np.exp(-(p**2)) * (1.0 + s * np.sin(2.0 * SQRT2 * cat.alpha * p)) / SQRT_PI
    return out if out.ndim else float(out)


def cond_density(cat: CatState, setting: Setting, outcome: int, basis: Basis, values):
    """Any of the four (Alice setting, Bob basis) conditional densities.

    Off-diagonal pairs carry no steering signature: after sigma_Z, P is the
    coherent-state Gaussian; after sigma_X, the +-i pi/4 phases cancel the X
    interference term and X is the even mixture of both hills.
    """
    _check_outcome(outcome)
    if (setting, basis) == ("Z", "X"):
        return cond_x_density(cat, outcome, values)
    if (setting, basis) == ("X", "P"):
        return cond_p_density(cat, outcome, values)
    v = np.asarray(values, dtype=float)
    if (setting, basis) == ("Z", "P"):
        out = np.exp(-(v**2)) / SQRT_PI
    elif (setting, basis) == ("X", "X"):
        out = 0.5 * (cond_x_density(cat, 1, v) + cond_x_density(cat, -1, v))
    else:
        raise ValueError(f"unknown setting/basis {setting!r}/{basis!r}")
    return out if np.ndim(out) else float(out)


def p_variance_deficit(alpha: float) -> float:
    """How far Var(P | sigma_X) sits below 1/2: ``2 alpha^2 exp(-4 alpha^2)``."""
    return 2.0 * alpha * alpha * math.exp(-4.0 * alpha * alpha)


def conditional_moments(cat: CatState, setting: Setting, outcome: int) -> MomentSummary:
    """Closed-form mean and variance of Bob's conditional quadrature.

    ``setting="Z"`` gives X given sigma_Z, ``setting="X"`` gives P given sigma_X.
    """
    s = _check_outcome(outcome)
    a = cat.alpha
    if setting == "Z":
        return MomentSummary(s * SQRT2 * a, 0.5)
    if setting == "X":
        return MomentSummary(s * SQRT2 * a * math.exp(-2.0 * a * a), 0.5 - p_variance_deficit(a))
    raise ValueError(f"setting must be 'Z' or 'X', got {setting!r}")


def conditional_dist(
    cat: CatState, setting: Setting, outcome: int, grid: QuadratureGrid | None = None
) -> ConditionalDist:
    """Tabulate the conditional density for ``setting`` on ``grid`` (default grid if None)."""
    if setting == "Z":
        grid = grid or default_x_grid(cat)
        dens = cond_x_density(cat, outcome, grid.points)
        basis = "X"
    elif setting == "X":
        grid = grid or default_p_grid(cat)
        check_fringe_resolution(grid, cat.alpha)
        dens = cond_p_density(cat, outcome, grid.points)
        basis = "P"
    else:
        raise ValueError(f"setting must be 'Z' or 'X', got {setting!r}")
    return ConditionalDist(basis, setting, _check_outcome(outcome), grid, np.atleast_1d(dens), cat.alpha)


def inference_variances(cat: CatState) -> InferenceVariances:
    """Average inference variances of X (from sigma_Z) and P (from sigma_X).

    Both of Alice's outcomes occur with probability 1/2 for either setting.
    """
    vx = 0.5 * sum(conditional_moments(cat, "Z", o).variance for o in (1, -1))
    vp = 0.5 * sum(conditional_moments(cat, "X", o).variance for o in (1, -1))
    return InferenceVariances(vx, vp)


def numeric_inference_variances(cat: CatState, step: float | None = None) -> InferenceVariances:
    """Inference variances by trapezoid integration of the tabulated conditionals."""
    gx = default_x_grid(cat) if step is None else QuadratureGrid.centered(SQRT2 * cat.alpha + 8, step)
    gp = default_p_grid(cat) if step is None else QuadratureGrid.centered(8.0, step)
    vx = 0.5 * sum(conditional_dist(cat, "Z", o, gx).moments().variance for o in (1, -1))
    vp = 0.5 * sum(conditional_dist(cat, "X", o, gp).moments().variance for o in (1, -1))
    return InferenceVariances(vx, vp)


def steering_report(cat: CatState) -> SteeringReport:
    """Quadrature witness ``dX_inf dP_inf`` against 1/2."""
    v = inference_variances(cat)
    return product_witness(v.var_inf_x, v.var_inf_p, QUADRATURE_BOUND)


def witness_shortfall(alpha: float) -> float:
    """``1/2 - dX_inf dP_inf`` evaluated without cancellation.

    The product is ``sqrt(1 - u)/2`` with ``u = 4 alpha^2 exp(-4 alpha^2)``, so the
    shortfall is ``u / (2 (1 + sqrt(1 - u)))``. It stays positive (if tiny) at
    large alpha where the product itself rounds to exactly 0.5.
    """
    u = 2.0 * p_variance_deficit(alpha)
    return u / (2.0 * (1.0 + math.sqrt(1.0 - u)))


def element_of_reality_predictions(
    cat: CatState,
    eor: ElementOfRealityState,
    x_grid: QuadratureGrid | None = None,
    p_grid: QuadratureGrid | None = None,
) -> tuple[ConditionalDist, ConditionalDist]:
    """X and P predictions of the hidden state ``(lambda_z, lambda_x)``."""
    return (
        conditional_dist(cat, "Z", eor.lambda_z, x_grid),
        conditional_dist(cat, "X", eor.lambda_x, p_grid),
    )


def fig2_density_grid(
    cat: CatState, eor: ElementOfRealityState, gx: QuadratureGrid, gp: QuadratureGrid
) -> np.ndarray:
    """Joint prediction ``P_{lz}(x_i) * P_{lx}(p_j)`` as an ``(len(gx), len(gp))`` matrix."""
    check_fringe_resolution(gp, cat.alpha)
    px = cond_x_density(cat, eor.lambda_z, gx.points)
    pp = cond_p_density(cat, eor.lambda_x, gp.points)
    return np.outer(px, pp)


def fig2_grids(cat: CatState, eor: ElementOfRealityState, x_half: float = 4.0, p_half: float = 4.0,
               x_step: float = 0.05) -> tuple[QuadratureGrid, QuadratureGrid]:
    """Plot window for one contour panel: X around the selected hill, P fringe-resolved.

    The X window is centred on the hill (the other hill carries no weight for a
    fixed ``lambda_z``); the P grid contains p = 0 so fringe extrema are sampled.
    """
    c = eor.lambda_z * SQRT2 * cat.alpha
    m = int(math.ceil(x_half / x_step))
    gx = QuadratureGrid(c - m * x_step, c + m * x_step, x_step)
    return gx, default_p_grid(cat, half_width=p_half)
