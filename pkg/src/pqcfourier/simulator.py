"""Exact statevector simulation with analytic gradients.

Gates are single-qubit rotations R_a(phi) = exp(-i*phi/2 * sigma_a), the
composite ROT(a, b, c) = RZ(c)·RY(b)·RZ(a) (a applied first), and CNOT.
Rotation angles come from one of three bindings: a trainable parameter slot,
a feature encoding (angle = prefactor·x_feature), or a fixed value.

Qubit 0 is the top wire; basis-state bit k is qubit k. All arithmetic is
double-precision complex.

Gradients use a reverse-pass adjoint sweep: after the forward run, the
observable is applied once and both vectors are walked backward through the
gate list, yielding every d<M>/d(theta_k) = Im <lam| sigma |psi> in a single
O(n_gates) pass. Batched variants evaluate many feature rows at once on
(n_rows, 2^n) arrays through the kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .backend import kernels
from .errors import ConfigurationError, ContractViolationError

_KINDS = ("rx", "ry", "rz", "rot", "cnot")
_AXIS_CODE = {"rx": 0, "ry": 1, "rz": 2}
_X_DOMAIN_TOL = 1e-9


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StateVector:
    """Amplitudes over the 2^n computational basis states."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ConfigurationError(f"n_qubits must be >= 1, got {self.n_qubits}")
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ConfigurationError(
                f"amplitude array of shape {amps.shape} does not match {self.n_qubits} qubits"
            )
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def zero_state(n_qubits: int) -> StateVector:
    """|0...0> on n_qubits."""
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


@dataclass(frozen=True)
class Gate:
    """One circuit gate with its angle binding.

    kind: 'rx' | 'ry' | 'rz' | 'rot' | 'cnot'. Rotations bind exactly one of
    param_slot (ROT uses slots param_slot..param_slot+2), (feature, prefactor),
    or a fixed angle. CNOT binds nothing and carries a control index.
    """

    kind: str
    qubit: int
    control: Optional[int] = None
    param_slot: Optional[int] = None
    feature: Optional[int] = None
    prefactor: Optional[float] = None
    angle: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown gate kind {self.kind!r}")
        if self.qubit < 0:
            raise ConfigurationError(f"negative qubit index {self.qubit}")
        if self.kind == "cnot":
            if self.control is None or self.control == self.qubit or self.control < 0:
                raise ConfigurationError(
                    f"cnot needs a distinct control, got control={self.control} target={self.qubit}"
                )
            if (self.param_slot, self.feature, self.prefactor, self.angle) != (None,) * 4:
                raise ConfigurationError("cnot takes no angle binding")
            return
        if self.control is not None:
            raise ConfigurationError(f"{self.kind} gate cannot have a control qubit")
        bindings = [self.param_slot is not None, self.feature is not None, self.angle is not None]
        if sum(bindings) != 1:
            raise ConfigurationError(
                f"{self.kind} gate must bind exactly one of param_slot/feature/angle"
            )
        if self.kind == "rot" and self.param_slot is None:
            raise ConfigurationError("rot gates must bind a trainable parameter slot")
        if self.feature is not None and not self.prefactor:
            raise ConfigurationError("encoding gates need a nonzero prefactor")
        if self.feature is None and self.prefactor is not None:
            raise ConfigurationError("prefactor is only meaningful with a feature binding")


class Prim(NamedTuple):
    """A primitive operation: one 1-qubit rotation or one CNOT."""

    is_cnot: bool
    axis: int          # 0=x, 1=y, 2=z for rotations
    qubit: int
    control: int       # -1 unless cnot
    slot: int          # trainable slot, -1 otherwise
    feature: int       # encoding feature, -1 otherwise
    prefactor: float
    angle: float       # fixed angle when slot == feature == -1
    noise_1q: bool     # a single-qubit noise event attaches after this prim


def expand_gates(gates: Sequence[Gate]) -> tuple:
    """Flatten gates into primitives; ROT becomes RZ, RY, RZ on consecutive slots.

    Noise-event tagging: each encoding rotation and each ROT carries one
    single-qubit event (on the last primitive of the ROT); CNOT primitives
    carry their own two-qubit event.
    """
    prims = []
    for g in gates:
        if g.kind == "cnot":
            prims.append(Prim(True, -1, g.qubit, g.control, -1, -1, 0.0, 0.0, False))
        elif g.kind == "rot":
            s = g.param_slot
            prims.append(Prim(False, 2, g.qubit, -1, s, -1, 0.0, 0.0, False))
            prims.append(Prim(False, 1, g.qubit, -1, s + 1, -1, 0.0, 0.0, False))
            prims.append(Prim(False, 2, g.qubit, -1, s + 2, -1, 0.0, 0.0, True))
        else:
            axis = _AXIS_CODE[g.kind]
            if g.feature is not None:
                prims.append(Prim(False, axis, g.qubit, -1, -1, g.feature, float(g.prefactor), 0.0, True))
            elif g.param_slot is not None:
                prims.append(Prim(False, axis, g.qubit, -1, g.param_slot, -1, 0.0, 0.0, True))
            else:
                prims.append(Prim(False, axis, g.qubit, -1, -1, -1, 0.0, float(g.angle), True))
    return tuple(prims)


def rotation_matrix(axis: int, angle: float) -> np.ndarray:
    """2x2 matrix of exp(-i*angle/2 * sigma_axis)."""
    c = np.cos(0.5 * angle)
    s = np.sin(0.5 * angle)
    if axis == 0:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if axis == 1:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if axis == 2:
        return np.array([[c - 1j * s, 0.0], [0.0, c + 1j * s]], dtype=np.complex128)
    raise ConfigurationError(f"axis code {axis} not in (0, 1, 2)")


# ---------------------------------------------------------------------------
# Single-state operations
# ---------------------------------------------------------------------------

def apply_gate(state: StateVector, gate: Gate, angle_values=None) -> StateVector:
    """Apply one gate, resolving its angle(s) from `angle_values` if needed.

    `angle_values`: scalar or length-1 sequence for rx/ry/rz, 3 values for
    rot, ignored for cnot and for gates with a fixed angle. Returns a new
    StateVector; norm is preserved.
    """
    n = state.n_qubits
    if gate.qubit >= n or (gate.control is not None and gate.control >= n):
        raise ConfigurationError(
            f"gate on qubit {gate.qubit} (control {gate.control}) exceeds {n} qubits"
        )
    work = state.amplitudes.copy().reshape(1, -1)
    if gate.kind == "cnot":
        kernels.apply_cnot(work, gate.control, gate.qubit)
        return StateVector(n, work[0])
    if gate.kind == "rot":
        angles = np.atleast_1d(np.asarray(angle_values, dtype=float))
        if angles.shape != (3,):
            raise ContractViolationError(f"rot needs 3 angles, got {angles.shape}")
        if not np.all(np.isfinite(angles)):
            raise ContractViolationError("angles must be finite")
        for axis, ang in zip((2, 1, 2), angles):
            kernels.apply_1q(work, gate.qubit, rotation_matrix(axis, ang))
        return StateVector(n, work[0])
    if gate.angle is not None:
        ang = float(gate.angle)
    else:
        angles = np.atleast_1d(np.asarray(angle_values, dtype=float))
        if angles.shape != (1,):
            raise ContractViolationError(f"{gate.kind} needs 1 angle, got {angles.shape}")
        ang = float(angles[0])
    if not np.isfinite(ang):
        raise ContractViolationError("angles must be finite")
    kernels.apply_1q(work, gate.qubit, rotation_matrix(_AXIS_CODE[gate.kind], ang))
    return StateVector(n, work[0])


def expectation_z(state: StateVector, qubit: int) -> float:
    """<Z> on one qubit: sum of |amplitude|^2 signed by that qubit's bit."""
    if not 0 <= qubit < state.n_qubits:
        raise ConfigurationError(f"qubit {qubit} out of range for {state.n_qubits} qubits")
    return float(kernels.expect_z(state.amplitudes.reshape(1, -1), qubit)[0])


# ---------------------------------------------------------------------------
# Circuit evaluation (single row and batched)
# ---------------------------------------------------------------------------

def _validate_inputs(circuit, x_rows: np.ndarray, theta: np.ndarray):
    if x_rows.ndim != 2 or x_rows.shape[1] != circuit.n_features:
        raise ContractViolationError(
            f"feature rows of shape {x_rows.shape} do not match n_features={circuit.n_features}"
        )
    if theta.shape != (circuit.n_params,):
        raise ContractViolationError(
            f"theta of shape {theta.shape} does not match n_params={circuit.n_params}"
        )
    if not (np.all(np.isfinite(x_rows)) and np.all(np.isfinite(theta))):
        raise ContractViolationError("inputs must be finite")
    if x_rows.size and np.max(np.abs(x_rows)) > np.pi + _X_DOMAIN_TOL:
        raise ContractViolationError("feature values must lie in [-pi, pi]")


def _forward(prims, n_qubits: int, x_rows: np.ndarray, theta: np.ndarray) -> np.ndarray:
    n_rows = x_rows.shape[0]
    psi = np.zeros((n_rows, 1 << n_qubits), dtype=np.complex128)
    psi[:, 0] = 1.0
    for p in prims:
        if p.is_cnot:
            kernels.apply_cnot(psi, p.control, p.qubit)
        elif p.feature >= 0:
            kernels.apply_1q_angles(psi, p.qubit, p.axis, p.prefactor * x_rows[:, p.feature])
        elif p.slot >= 0:
            kernels.apply_1q(psi, p.qubit, rotation_matrix(p.axis, theta[p.slot]))
        else:
            kernels.apply_1q(psi, p.qubit, rotation_matrix(p.axis, p.angle))
    return psi


def _unapply(psi, prim, x_rows, theta):
    if prim.is_cnot:
        kernels.apply_cnot(psi, prim.control, prim.qubit)
    elif prim.feature >= 0:
        kernels.apply_1q_angles(psi, prim.qubit, prim.axis, -prim.prefactor * x_rows[:, prim.feature])
    elif prim.slot >= 0:
        kernels.apply_1q(psi, prim.qubit, rotation_matrix(prim.axis, -theta[prim.slot]))
    else:
        kernels.apply_1q(psi, prim.qubit, rotation_matrix(prim.axis, -prim.angle))


def _combine_scale(circuit) -> float:
    if getattr(circuit, "combine", "sum") == "mean":
        return 1.0 / len(circuit.measurement_qubits)
    return 1.0


def run_circuit(circuit, x, theta) -> StateVector:
    """Final statevector of the circuit at feature vector x and parameters theta."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    theta = np.asarray(theta, dtype=float)
    _validate_inputs(circuit, x.reshape(1, -1), theta)
    psi = _forward(expand_gates(circuit.gates), circuit.n_qubits, x.reshape(1, -1), theta)
    return StateVector(circuit.n_qubits, psi[0])


def model_output_batch(circuit, x_rows, theta) -> np.ndarray:
    """Model value at each feature row: combined <Z> over measurement qubits."""
    x_rows = np.ascontiguousarray(x_rows, dtype=float)
    theta = np.asarray(theta, dtype=float)
    _validate_inputs(circuit, x_rows, theta)
    psi = _forward(expand_gates(circuit.gates), circuit.n_qubits, x_rows, theta)
    out = np.zeros(x_rows.shape[0])
    for q in circuit.measurement_qubits:
        out += kernels.expect_z(psi, q)
    return out * _combine_scale(circuit)


def model_output(circuit, x, theta) -> float:
    """Model value at a single feature vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(model_output_batch(circuit, x.reshape(1, -1), theta)[0])


def gradient_batch(circuit, x_rows, theta, weights=None) -> np.ndarray:
    """Adjoint-sweep gradients of the model output.

    With weights=None returns the (n_rows, n_params) per-row Jacobian;
    with a weight vector w returns the length-n_params gradient of
    sum_r w_r * f(x_r), which is what loss gradients need.
    """
    x_rows = np.ascontiguousarray(x_rows, dtype=float)
    theta = np.asarray(theta, dtype=float)
    _validate_inputs(circuit, x_rows, theta)
    prims = expand_gates(circuit.gates)
    n_rows = x_rows.shape[0]

    psi = _forward(prims, circuit.n_qubits, x_rows, theta)
    zsigns = _zsign_table(circuit.n_qubits, circuit.measurement_qubits)
    lam = psi * zsigns[None, :]
    lam *= _combine_scale(circuit)
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (n_rows,):
            raise ContractViolationError(f"weights shape {weights.shape} != ({n_rows},)")
        lam *= weights[:, None]
        grad = np.zeros(circuit.n_params)
    else:
        grad = np.zeros((n_rows, circuit.n_params))

    for p in reversed(prims):
        if not p.is_cnot and p.slot >= 0:
            vals = kernels.pauli_imag_inner(lam, psi, p.qubit, p.axis)
            if weights is not None:
                grad[p.slot] += vals.sum()
            else:
                grad[:, p.slot] += vals
        _unapply(psi, p, x_rows, theta)
        _unapply(lam, p, x_rows, theta)
    return grad


def gradient(circuit, x, theta) -> np.ndarray:
    """d model_output / d theta_k at a single feature vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return gradient_batch(circuit, x.reshape(1, -1), theta)[0]


def _zsign_table(n_qubits: int, qubits) -> np.ndarray:
    """Diagonal of sum_q Z_q over the given qubits, as a length-2^n sign table."""
    idx = np.arange(1 << n_qubits)
    signs = np.zeros(1 << n_qubits)
    for q in qubits:
        signs += 1.0 - 2.0 * ((idx >> q) & 1)
    return signs
