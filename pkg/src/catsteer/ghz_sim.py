"""Dense state-vector model of the GHZ cat ``(|up>^N - |down>^N)/sqrt(2)``.

Qubit ``k`` (1-based) is bit ``N - k`` of the basis index, so qubit 1 is the
most significant bit and Alice's qubit ``N`` is the least significant. Spin up is
bit value 0, so all-up is index 0 and all-down is ``2**N - 1``.

Units: the collective spin of Bob's ``N - 1`` qubits counts each qubit as
+-1/2 (outcomes ``+-(N-1)/2``), while the product observables ``Pr_Y`` and
``Pr_Y(J)`` have Pauli eigenvalues +-1. With that mix,
``dS_Z dPr_Y >= |<sum_J Pr_Y(J)>| / 2`` is the Robertson relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .analytic_cat import MomentSummary
from .errors import ImpossibleOutcomeError
from .steering import SteeringReport, product_witness

MAX_QUBITS = 24

Setting = Literal["Z", "X", "Y"]

_SQ = 1.0 / math.sqrt(2.0)
_EIGVECS = {
    ("Z", 1): np.array([1.0, 0.0], dtype=complex),
    ("Z", -1): np.array([0.0, 1.0], dtype=complex),
    ("X", 1): np.array([_SQ, _SQ], dtype=complex),
    ("X", -1): np.array([_SQ, -_SQ], dtype=complex),
    ("Y", 1): np.array([_SQ, 1j * _SQ], dtype=complex),
    ("Y", -1): np.array([_SQ, -1j * _SQ], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class QubitState:
    """``n`` qubits as a dense complex vector of length ``2**n``."""

    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n,):
            raise ValueError(f"need {2**self.n} amplitudes for {self.n} qubits")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


GhzState = QubitState


@dataclass(frozen=True)
class PauliString:
    """Per-qubit Pauli labels, e.g. ``PauliString("YYX")``; position 0 is qubit 1."""

    ops: str

    def __post_init__(self):
        bad = set(self.ops) - set("IXYZ")
        if bad:
            raise ValueError(f"unknown Pauli symbols {sorted(bad)} in {self.ops!r}")

    def __len__(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class CollectiveSpinDist:
    support: np.ndarray = field(repr=False)
    probabilities: np.ndarray = field(repr=False)

    def moments(self) -> MomentSummary:
        mean = float(self.probabilities @ self.support)
        var = float(self.probabilities @ (self.support - mean) ** 2)
        return MomentSummary(mean, max(var, 0.0))


@dataclass(frozen=True)
class GhzInference:
    """Conditional statistics feeding the GHZ witness for one choice of Alice settings."""

    n: int
    pry_setting: str
    bound_setting: str
    var_inf_sz: float
    var_inf_pry: float
    inferred_bound: float
    pry_j_values: dict


def _check_n(n: int, lo: int = 2) -> None:
    if not lo <= n <= MAX_QUBITS:
        raise ValueError(f"n must be in [{lo}, {MAX_QUBITS}], got {n}")


def build_ghz(n: int) -> QubitState:
    _check_n(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = _SQ
    amps[-1] = -_SQ
    return QubitState(n, amps)


def apply_pauli(state: QubitState, ps: PauliString) -> np.ndarray:
    """``P|psi>`` by bit manipulation: ``P|b> = phase(b) |b xor flips>``."""
    if len(ps) != state.n:
        raise ValueError(f"Pauli string of length {len(ps)} on {state.n} qubits")
    n = state.n
    idx = np.arange(2**n, dtype=np.int64)
    phase = np.ones(2**n, dtype=complex)
    flips = 0
    for k, op in enumerate(ps.ops):
        if op == "I":
            continue
        shift = n - 1 - k
        sign = 1 - 2 * ((idx >> shift) & 1)  # +1 for up, -1 for down
        if op == "Z":
            phase *= sign
        elif op == "X":
            flips |= 1 << shift
        else:  # Y|up> = i|down>, Y|down> = -i|up>
            phase *= 1j * sign
            flips |= 1 << shift
    out = np.empty_like(state.amplitudes)
    out[idx ^ flips] = phase * state.amplitudes
    return out


def expectation(state: QubitState, ps: PauliString) -> float:
    val = np.vdot(state.amplitudes, apply_pauli(state, ps))
    if abs(val.imag) > 1e-12:
        raise ValueError(f"non-real expectation {val} for Hermitian string {ps.ops}")
    return float(val.real)


def two_branch_expectation(n: int, ps: PauliString) -> float:
    """``<GHZ|P|GHZ>`` from the two branches alone, without a state vector.

    Diagonal terms need only Z/I factors; the cross term needs every factor to
    flip (X or Y).
    """
    if len(ps) != n:
        raise ValueError("length mismatch")
    ops = ps.ops
    if all(o in "IZ" for o in ops):
        # <up..|P|up..> = 1, <dn..|P|dn..> = (-1)^{#Z}
        return 0.5 * (1 + (-1) ** ops.count("Z"))
    if all(o in "XY" for o in ops):
        ny = ops.count("Y")
        # P|dn..> = (-i)^ny |up..>; amplitudes +1/sqrt2 (up) and -1/sqrt2 (down)
        cross = -0.5 * (-1j) ** ny
        return float((cross + np.conj(cross)).real)
    return 0.0


def alice_condition(state: QubitState, setting: Setting, outcome: int) -> tuple[float, QubitState]:
    """Alice measures qubit ``N`` along ``setting``; return probability and Bob's state."""
    try:
        e = _EIGVECS[(setting, outcome)]
    except KeyError:
        raise ValueError(f"bad setting/outcome {setting!r}, {outcome!r}") from None
    pairs = state.amplitudes.reshape(-1, 2)
    branch = pairs @ e.conj()
    prob = float(np.vdot(branch, branch).real)
    if prob <= 1e-300:
        raise ImpossibleOutcomeError(f"outcome {outcome} of sigma_{setting} has zero probability")
    return prob, QubitState(state.n - 1, branch / math.sqrt(prob))


def collective_sz_dist(cond: QubitState) -> CollectiveSpinDist:
    """Distribution of ``S_Z = sum_k sigma_Z^(k) / 2`` over Bob's qubits."""
    m = cond.n
    downs = np.array([bin(i).count("1") for i in range(2**m)])
    probs = np.bincount(downs, weights=np.abs(cond.amplitudes) ** 2, minlength=m + 1)
    support = (m - 2 * np.arange(m + 1)) / 2.0
    return CollectiveSpinDist(support, probs / probs.sum())


def pr_y_string(m: int) -> PauliString:
    return PauliString("Y" * m)


def pr_y_j_string(m: int, J: int) -> PauliString:
    if not 1 <= J <= m:
        raise IndexError(f"J must be in 1..{m}, got {J}")
    return PauliString("Y" * (J - 1) + "X" + "Y" * (m - J))


def pr_y(cond: QubitState) -> MomentSummary:
    """Mean and variance of the product of sigma_Y over Bob's qubits (squares to 1)."""
    mean = expectation(cond, pr_y_string(cond.n))
    return MomentSummary(mean, max(1.0 - mean * mean, 0.0))


def pr_y_J(cond: QubitState, J: int) -> float:
    return expectation(cond, pr_y_j_string(cond.n, J))


def ur_bound(cond: QubitState) -> float:
    """Right side of the spin uncertainty relation, ``|<sum_J Pr_Y(J)>| / 2``."""
    return abs(sum(pr_y_J(cond, J) for J in range(1, cond.n + 1))) / 2.0


def ur_lhs(cond: QubitState) -> float:
    """``dS_Z * dPr_Y`` for a genuine state of Bob's qubits."""
    return math.sqrt(collective_sz_dist(cond).moments().variance * pr_y(cond).variance)


def reduced_bob_state(state: QubitState) -> np.ndarray:
    """Density matrix of qubits 1..N-1 with Alice's qubit traced out."""
    pairs = state.amplitudes.reshape(-1, 2)
    return pairs @ pairs.conj().T


def _branches(state: QubitState, setting: Setting):
    out = []
    for o in (1, -1):
        try:
            out.append((o, *alice_condition(state, setting, o)))
        except ImpossibleOutcomeError:
            continue
    return out


def ghz_inference(n: int, pry_setting: Setting = "X", bound_setting: Setting = "Y") -> GhzInference:
    """Inferred statistics of Bob's observables for the given Alice settings.

    ``S_Z`` is always inferred from Alice's sigma_Z. ``Pr_Y`` is inferred from
    ``pry_setting`` and the ``Pr_Y(J)`` bound from ``bound_setting``; the bound
    is ``sum_o P(o) |<sum_J Pr_Y(J)>_o| / 2``.
    """
    _check_n(n, 3)
    state = build_ghz(n)
    var_sz = sum(p * collective_sz_dist(c).moments().variance for _, p, c in _branches(state, "Z"))
    var_pry = sum(p * pr_y(c).variance for _, p, c in _branches(state, pry_setting))
    bound = 0.0
    values = {}
    for o, p, c in _branches(state, bound_setting):
        vals = [pr_y_J(c, J) for J in range(1, n)]
        values[o] = vals
        bound += p * abs(sum(vals)) / 2.0
    return GhzInference(n, pry_setting, bound_setting, var_sz, var_pry, bound, values)


def ghz_steering_witness(n: int, smearing: float = 0.0, assignment: str = "auto") -> SteeringReport:
    """GHZ witness ``dS_Z,inf * dPr_Y,inf < inferred |<sum_J Pr_Y(J)>|/2``.

    ``assignment`` picks which of Alice's settings infers ``Pr_Y`` and which
    supplies the ``Pr_Y(J)`` bound: ``"XY"`` (X infers ``Pr_Y``), ``"YX"``, or
    ``"auto"`` for whichever gives the larger margin. With ``N - 1`` even the X
    setting predicts ``Pr_Y``; with ``N - 1`` odd the roles swap.

    ``smearing`` adds ``smearing**2`` to both inference variances (outcome
    resolution of that many units).
    """
    if smearing < 0:
        raise ValueError("smearing must be non-negative")
    choices = {"XY": ("X", "Y"), "YX": ("Y", "X")}
    keys = list(choices) if assignment == "auto" else [assignment]
    reports = []
    for key in keys:
        if key not in choices:
            raise ValueError(f"assignment must be 'auto', 'XY' or 'YX', got {assignment!r}")
        inf = ghz_inference(n, *choices[key])
        s2 = smearing * smearing
        reports.append(product_witness(inf.var_inf_sz + s2, inf.var_inf_pry + s2, inf.inferred_bound))
    return max(reports, key=lambda r: r.margin)


def unconditioned_witness(n: int) -> SteeringReport:
    """The same quantities with Alice ignored: Bob's reduced state alone."""
    _check_n(n, 3)
    rho = reduced_bob_state(build_ghz(n))
    m = n - 1
    diag = np.diag(rho).real
    downs = np.array([bin(i).count("1") for i in range(2**m)])
    sz = (m - 2 * downs) / 2.0
    var_sz = float(diag @ sz**2 - (diag @ sz) ** 2)

    def mixed_expect(ps: PauliString) -> float:
        # Tr(rho P) through the eigen-decomposition of rho
        w, v = np.linalg.eigh(rho)
        return float(sum(wi * np.vdot(v[:, i], apply_pauli(QubitState(m, v[:, i]), ps)).real
                         for i, wi in enumerate(w) if wi > 1e-15))

    mean_pry = mixed_expect(pr_y_string(m))
    bound = abs(sum(mixed_expect(pr_y_j_string(m, J)) for J in range(1, m + 1))) / 2.0
    return product_witness(var_sz, 1.0 - mean_pry**2, bound)
