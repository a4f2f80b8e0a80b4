"""Brute-force oracle for the coherent cat in a truncated number basis.

Everything here is computed from amplitudes ``c[s, n]`` (spin ``s`` in {up, down},
oscillator number ``n``), independently of the closed forms in
:mod:`catsteer.analytic_cat`:

* X-basis wavefunctions use normalized Hermite functions built by recurrence.
* P-basis wavefunctions use ``<p|n> = i^n psi_n(p)``, which is the Fourier
  relation for P = i(a - a^dag)/sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import gammainc

from .errors import ImpossibleOutcomeError, TruncationError
from .steering import SteeringReport

#: Largest discarded Poisson tail mass tolerated when building coherent amplitudes.
TAIL_TOL = 1e-12

SpinSetting = Literal["Z", "X", "Y"]

_SQ = 1.0 / math.sqrt(2.0)
# eigenvectors (up, down components) for outcome +1 / -1
_SPIN_EIGVECS = {
    ("Z", 1): np.array([1.0, 0.0], dtype=complex),
    ("Z", -1): np.array([0.0, 1.0], dtype=complex),
    ("X", 1): np.array([_SQ, _SQ], dtype=complex),
    ("X", -1): np.array([_SQ, -_SQ], dtype=complex),
    ("Y", 1): np.array([_SQ, 1j * _SQ], dtype=complex),
    ("Y", -1): np.array([_SQ, -1j * _SQ], dtype=complex),
}


@dataclass(frozen=True)
class FockConfig:
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

    @classmethod
    def for_alpha(cls, alpha: float) -> "FockConfig":
        return cls(required_dim(alpha))


@dataclass(frozen=True, eq=False)
class OscillatorState:
    amplitudes: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class JointFockState:
    """Spin x oscillator amplitudes, shape ``(2, dim)``; row 0 is spin up."""

    amplitudes: np.ndarray = field(repr=False)
    truncation_error: float = 0.0

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[1]


@dataclass(frozen=True)
class BlochVector:
    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if self.bx**2 + self.by**2 + self.bz**2 > 1 + 1e-12:
            raise ValueError(f"Bloch vector longer than 1: {self}")

    @property
    def length(self) -> float:
        return math.sqrt(self.bx**2 + self.by**2 + self.bz**2)

    def component(self, axis: str) -> float:
        return {"X": self.bx, "Y": self.by, "Z": self.bz}[axis]

    @classmethod
    def from_density(cls, rho: np.ndarray) -> "BlochVector":
        """Bloch vector of a 2x2 density matrix (normalised first)."""
        rho = rho / np.trace(rho).real
        return cls(
            bx=float(2 * rho[0, 1].real),
            by=float(-2 * rho[0, 1].imag),
            bz=float((rho[0, 0] - rho[1, 1]).real),
        )


def required_dim(alpha: float) -> int:
    """Truncation dimension ``ceil(alpha^2 + 8 alpha + 20)``."""
    return int(math.ceil(alpha * alpha + 8 * abs(alpha) + 20))


def truncation_error(alpha: float, dim: int) -> float:
    """Poisson tail ``sum_{n >= dim} e^{-a^2} a^{2n} / n!`` discarded by truncating at ``dim``."""
    if alpha == 0:
        return 0.0
    # P(N >= dim) for N ~ Poisson(lam) is the regularised lower incomplete gamma.
    return float(gammainc(dim, alpha * alpha))


def coherent_amplitudes(alpha: float, dim: int) -> np.ndarray:
    """Number-basis amplitudes of ``|alpha>`` up to ``n = dim - 1``.

    Uses ``c[n+1] = c[n] alpha / sqrt(n+1)`` from ``c[0] = exp(-alpha^2/2)``.
    """
    tail = truncation_error(alpha, dim)
    if tail > TAIL_TOL:
        raise TruncationError(
            f"dim={dim} discards {tail:.3g} of |alpha={alpha}> "
            f"(use dim >= {required_dim(alpha)})"
        )
    c = np.empty(dim, dtype=complex)
    c[0] = math.exp(-alpha * alpha / 2)
    for n in range(dim - 1):
        c[n + 1] = c[n] * alpha / math.sqrt(n + 1)
    return c


def build_coherent_cat(alpha: float, dim: int | None = None) -> JointFockState:
    """The cat ``(e^{-i pi/4}|alpha>|up> + e^{i pi/4}|-alpha>|down>)/sqrt(2)``, renormalised."""
    dim = required_dim(alpha) if dim is None else dim
    amps = np.empty((2, dim), dtype=complex)
    amps[0] = np.exp(-1j * math.pi / 4) * coherent_amplitudes(alpha, dim) / math.sqrt(2)
    amps[1] = np.exp(1j * math.pi / 4) * coherent_amplitudes(-alpha, dim) / math.sqrt(2)
    deficit = 1.0 - float(np.sum(np.abs(amps) ** 2))
    amps /= np.linalg.norm(amps)
    return JointFockState(amps, truncation_error=max(deficit, 0.0))


def product_state(spin: np.ndarray, osc: np.ndarray) -> JointFockState:
    """``|spin> x |osc>`` from a 2-vector and a number-basis vector."""
    amps = np.outer(np.asarray(spin, dtype=complex), np.asarray(osc, dtype=complex))
    return JointFockState(amps / np.linalg.norm(amps))


def hermite_functions(nmax: int, x) -> np.ndarray:
    """Oscillator eigenfunctions ``psi_0..psi_nmax`` at ``x``; shape ``(nmax+1,) + x.shape``.

    Recurrence on normalised functions,
    ``psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}``,
    so no raw Hermite polynomial (or factorial) is ever formed.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-x * x / 2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_wavefunction(n: int, x):
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    out = hermite_functions(n, x)[n]
    return out if out.ndim else float(out)


def _spin_vector(setting: SpinSetting, outcome: int) -> np.ndarray:
    try:
        return _SPIN_EIGVECS[(setting, outcome)]
    except KeyError:
        raise ValueError(f"bad spin setting/outcome {setting!r}, {outcome!r}") from None


def project_spin(
    state: JointFockState, setting: SpinSetting, outcome: int
) -> tuple[float, OscillatorState]:
    """Alice measures ``setting`` and gets ``outcome``; return its probability and Bob's state."""
    e = _spin_vector(setting, outcome)
    branch = e.conj() @ state.amplitudes
    prob = float(np.vdot(branch, branch).real)
    if prob <= 0.0:
        raise ImpossibleOutcomeError(f"outcome {outcome} of sigma_{setting} has zero probability")
    return prob, OscillatorState(branch / math.sqrt(prob))


def wavefunction(osc: OscillatorState, basis: Literal["X", "P"], value) -> np.ndarray:
    """Complex wavefunction of ``osc`` in the X or P quadrature basis."""
    psi = hermite_functions(osc.dim - 1, value)
    c = osc.amplitudes
    if basis == "P":
        c = c * (1j) ** np.arange(osc.dim)
    elif basis != "X":
        raise ValueError(f"basis must be 'X' or 'P', got {basis!r}")
    return np.tensordot(c, psi, axes=(0, 0))


def quadrature_density(osc: OscillatorState, basis: Literal["X", "P"], value):
    out = np.abs(wavefunction(osc, basis, value)) ** 2
    return out if np.ndim(out) else float(out)


def _annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def ladder_moments(osc: OscillatorState) -> dict[str, float]:
    """Means and variances of X and P from ladder-operator matrix elements.

    Truncation makes ``a^dag a`` exact but ``a a^dag`` wrong in the last level;
    the states used here carry negligible weight there.
    """
    a = _annihilation(osc.dim)
    ad = a.conj().T
    X = (a + ad) / math.sqrt(2)
    P = 1j * (a - ad) / math.sqrt(2)
    c = osc.amplitudes
    out = {}
    for name, op in (("X", X), ("P", P)):
        m = np.vdot(c, op @ c).real
        m2 = np.vdot(op @ c, op @ c).real
        out[f"mean_{name}"] = float(m)
        out[f"var_{name}"] = float(max(m2 - m * m, 0.0))
    return out


def reduced_spin(state: JointFockState) -> BlochVector:
    """Bloch vector of the spin with the oscillator traced out."""
    c = state.amplitudes
    return BlochVector.from_density(c @ c.conj().T)


def _conditioned_spin(state: JointFockState, osc_projector) -> tuple[float, BlochVector]:
    c = state.amplitudes
    rho = c @ osc_projector @ c.conj().T
    prob = float(np.trace(rho).real)
    if prob <= 0.0:
        raise ImpossibleOutcomeError("oscillator outcome has zero probability")
    return prob, BlochVector.from_density(rho)


def parity_condition(state: JointFockState, parity: int) -> tuple[float, BlochVector]:
    """Bob measures number parity (+1 even, -1 odd); return probability and Alice's spin."""
    if parity not in (1, -1):
        raise ValueError(f"parity must be +-1, got {parity}")
    keep = (np.arange(state.dim) % 2 == 0) == (parity == 1)
    proj = np.diag(keep.astype(float))
    return _conditioned_spin(state, proj)


def _half_line_overlaps(dim: int, sign: int, half_width: float) -> np.ndarray:
    """``M[n, m] = int_{sign x > 0} psi_n(x) psi_m(x) dx`` by Gauss-Legendre quadrature."""
    nodes, weights = np.polynomial.legendre.leggauss(max(200, 4 * dim))
    x = 0.5 * half_width * (nodes + 1.0) * sign
    w = 0.5 * half_width * weights
    psi = hermite_functions(dim - 1, x)
    return (psi * w) @ psi.T


def sign_condition(state: JointFockState, sign: int) -> tuple[float, BlochVector]:
    """Bob records the sign of X; return its probability and Alice's conditioned spin."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +-1, got {sign}")
    # psi_n for n < dim is negligible beyond sqrt(2 dim) + 10
    half_width = math.sqrt(2.0 * state.dim + 1.0) + 10.0
    # <n|Theta|m> for real psi_n; the amplitude product c Theta c^dag then gives rho
    return _conditioned_spin(state, _half_line_overlaps(state.dim, sign, half_width).T)


def _pauli_variance(b: BlochVector, axis: str) -> float:
    return max(1.0 - b.component(axis) ** 2, 0.0)


def inferred_spin_variance(state: JointFockState, partition: Literal["parity", "sign"], axis: str) -> float:
    """``sum_o P(o) Var(sigma_axis | o)`` with Bob's outcome ``o`` from ``partition``."""
    cond = parity_condition if partition == "parity" else sign_condition
    total = 0.0
    for o in (1, -1):
        try:
            p, b = cond(state, o)
        except ImpossibleOutcomeError:
            continue
        total += p * _pauli_variance(b, axis)
    return total


def spin_steering_witness(state: JointFockState, parity_axis: str = "Y") -> SteeringReport:
    """Steering of Alice's spin by measurements on the cat.

    Bob infers ``sigma_{parity_axis}`` from number parity and ``sigma_Z`` from
    the sign of X. Any local hidden spin state obeys
    ``Var(sigma_a) + Var(sigma_b) >= 1`` for orthogonal Paulis, hence the LHS
    bound ``Var_inf(sigma_a) + Var_inf(sigma_b) >= 1``.

    For this cat the default parity axis is Y: the ``e^{-+i pi/4}`` phases put the
    even and odd cat components on the sigma_Y eigenstates.
    """
    if parity_axis not in ("X", "Y"):
        raise ValueError(f"parity_axis must be 'X' or 'Y', got {parity_axis!r}")
    lhs = inferred_spin_variance(state, "parity", parity_axis) + inferred_spin_variance(state, "sign", "Z")
    return SteeringReport.evaluate(lhs, 1.0)
