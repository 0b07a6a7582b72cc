"""Controlled-u gates and the two evolution models.

The two-qubit gate family is controlled-u with
u(phi) = sigma_z cos(phi) + sigma_x sin(phi); phi = pi/2 is CNOT.
One-pass evolution applies one CNOT per (system qubit, assigned
environment qubit) pair.  The iterated channel is the exact convex
mixture over weighted digraph edges, applied N times; it is fully
deterministic (no trajectory sampling).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .digraph import InteractionDigraph
from .errors import NumericalError, ValidationError
from .qstate import DensityMatrix, RegisterLayout

REHERMITIZE_EVERY = 64


def single_u(phi: float) -> np.ndarray:
    """u(phi) on one qubit: a reflection, Hermitian and involutive."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [s, -c]], dtype=complex)


def controlled_u_gate(phi: float) -> np.ndarray:
    """4x4 controlled-u in the (control, target) basis ordering."""
    g = np.eye(4, dtype=complex)
    g[2:, 2:] = single_u(phi)
    return g


def _apply_gate_ket(tensor: np.ndarray, gate4: np.ndarray, ax_c: int, ax_t: int) -> np.ndarray:
    g = gate4.reshape(2, 2, 2, 2)
    out = np.tensordot(g, tensor, axes=([2, 3], [ax_c, ax_t]))
    return np.moveaxis(out, [0, 1], [ax_c, ax_t])


def conjugate_controlled_u(mat: np.ndarray, qubits: int, control: int, target: int,
                           phi: float) -> np.ndarray:
    """U rho U^+ for one controlled-u edge, via local tensor contraction."""
    gate = controlled_u_gate(phi)
    t = mat.reshape([2] * (2 * qubits))
    t = _apply_gate_ket(t, gate, control, target)
    t = _apply_gate_ket(t, gate.conj(), qubits + control, qubits + target)
    return t.reshape(mat.shape)


def controlled_u(i: int, j: int, phi: float, layout: RegisterLayout) -> np.ndarray:
    """Full-register unitary for the (i -> j) controlled-u edge."""
    layout.check_qubit(i)
    layout.check_qubit(j)
    if i == j:
        raise ValidationError(f"control and target coincide at qubit {i}")
    q = layout.qubits
    eye = np.eye(layout.dim, dtype=complex).reshape([2] * (2 * q))
    return _apply_gate_ket(eye, controlled_u_gate(phi), i, j).reshape(layout.dim, layout.dim)


def default_assignment(layout: RegisterLayout) -> dict[int, tuple[int, ...]]:
    """Contiguous equal blocks: S-qubit i gets the i-th n/k-slice of E."""
    k, n = layout.k, layout.n
    if n % k != 0:
        raise ValidationError(
            f"cannot split {n} environment qubits into {k} equal cells; pass an explicit assignment"
        )
    cell = n // k
    return {i: tuple(range(k + i * cell, k + (i + 1) * cell)) for i in range(k)}


def zurek_evolve(rho: DensityMatrix, assignment: dict[int, tuple[int, ...]] | None = None) -> DensityMatrix:
    """One-pass CNOT evolution: each system qubit hits each qubit of its
    assigned environment subset exactly once.

    The subsets must be disjoint and cover the environment.  All gates
    share controls on S and targets on disjoint E qubits, so they
    commute and the application order is irrelevant.
    """
    layout = rho.layout
    if layout.k < 1 or layout.n < 1:
        raise ValidationError("one-pass evolution needs k >= 1 and n >= 1")
    if assignment is None:
        assignment = default_assignment(layout)
    covered: set[int] = set()
    for s, targets in assignment.items():
        if not layout.is_system(s):
            raise ValidationError(f"assignment key {s} is not a system qubit")
        for t in targets:
            layout.check_qubit(t)
            if t < layout.k:
                raise ValidationError(f"assignment target {t} is a system qubit")
            if t in covered:
                raise ValidationError(f"environment qubit {t} assigned twice")
            covered.add(t)
    expected = set(range(layout.k, layout.qubits))
    if covered != expected:
        missing = sorted(expected - covered)
        raise ValidationError(f"environment qubits {missing} are not covered by the assignment")

    mat = rho.mat
    for s in sorted(assignment):
        for t in assignment[s]:
            mat = conjugate_controlled_u(mat, layout.qubits, s, t, np.pi / 2)
    return DensityMatrix(layout, mat)


@dataclass(frozen=True)
class ChannelSpec:
    """Iterated random-unitary channel: digraph, gate angle, step count."""

    digraph: InteractionDigraph
    phi: float = np.pi / 2
    steps: int = 0

    def __post_init__(self):
        if not 0.0 <= self.phi <= np.pi:
            raise ValidationError(f"phi = {self.phi} outside [0, pi]")
        if self.steps < 0:
            raise ValidationError(f"step count {self.steps} must be nonnegative")


def channel_step(rho: DensityMatrix, spec: ChannelSpec) -> DensityMatrix:
    """One application of the channel: sum_e p_e U_e rho U_e^+."""
    g = spec.digraph
    if rho.layout != g.layout:
        raise ValidationError(f"state layout {rho.layout} does not match digraph layout {g.layout}")
    q = rho.layout.qubits
    out = np.zeros_like(rho.mat)
    for (i, j), p in zip(g.edges, g.probabilities):
        out += p * conjugate_controlled_u(rho.mat, q, i, j, spec.phi)
    return DensityMatrix(rho.layout, out)


def iterate_channel(rho: DensityMatrix, spec: ChannelSpec, diagnostics: bool = False,
                    rehermitize_every: int = REHERMITIZE_EVERY):
    """Apply the channel spec.steps times.

    Re-Hermitizes every ``rehermitize_every`` steps to bound rounding
    drift.  With ``diagnostics`` the per-step trace distance to the
    previous state is returned alongside the final state.
    """
    state = rho
    distances: list[float] = []
    for step in range(1, spec.steps + 1):
        new = channel_step(state, spec)
        mat = new.mat
        if not np.all(np.isfinite(mat)):
            raise NumericalError(f"non-finite entries after channel step {step}")
        if rehermitize_every and step % rehermitize_every == 0:
            mat = (mat + mat.conj().T) / 2.0
            new = DensityMatrix(state.layout, mat)
        if diagnostics:
            from .qstate import trace_distance

            distances.append(trace_distance(new, state))
        state = new
    if diagnostics:
        return state, distances
    return state
