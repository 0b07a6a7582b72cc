"""Dense complex linear algebra over labeled qubit registers.

A register holds k system qubits followed by n environment qubits.
System qubits occupy the most-significant (leftmost) bit positions, so
a basis index y in [0, 2^(k+n)) decodes as y = s * 2^n + e with s the
system bit pattern and e the environment registry pattern, environment
qubits E1..En running left to right.

Entropies are in bits (base-2 logs) with the convention 0*log2(0) = 0.
Eigenvalues in [-1e-10, 0) are clamped to zero; anything more negative
is treated as evidence of a broken upstream state and raises.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DecompositionError,
    NumericalError,
    PSDViolationError,
    ValidationError,
)

DEFAULT_QUBIT_CAP = 14

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
EIGENVALUE_CLAMP = 1e-10
SPECTRUM_SUM_TOL = 1e-9
NORM_TOL = 1e-12


def qubit_cap() -> int:
    """Hard cap on register width, overridable via DARWIN_MAX_QUBITS."""
    raw = os.environ.get("DARWIN_MAX_QUBITS")
    if raw is None:
        return DEFAULT_QUBIT_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValidationError(f"DARWIN_MAX_QUBITS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValidationError(f"DARWIN_MAX_QUBITS must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit bookkeeping for a register of k system and n environment qubits.

    Simulation registers require k >= 1; marginals produced by partial
    traces may legitimately have k = 0 (environment-only fragments).
    """

    k: int
    n: int

    def __post_init__(self):
        if self.k < 0 or self.n < 0 or self.k + self.n < 1:
            raise ValidationError(f"invalid register: k={self.k}, n={self.n}")

    @property
    def qubits(self) -> int:
        return self.k + self.n

    @property
    def dim(self) -> int:
        return 2 ** self.qubits

    def is_system(self, qubit: int) -> bool:
        self.check_qubit(qubit)
        return qubit < self.k

    def env_qubit(self, t: int) -> int:
        """Global index of environment qubit E_t (t = 1..n)."""
        if not 1 <= t <= self.n:
            raise ValidationError(f"E_{t} out of range for n={self.n}")
        return self.k + t - 1

    def check_qubit(self, qubit: int):
        if not 0 <= qubit < self.qubits:
            raise ValidationError(f"qubit {qubit} out of range for {self.qubits}-qubit register")

    def decode(self, index: int) -> tuple[int, int]:
        """Split a basis index into (system pattern, environment registry)."""
        if not 0 <= index < self.dim:
            raise ValidationError(f"basis index {index} out of range")
        return index >> self.n, index & ((1 << self.n) - 1)


def _check_cap(layout: RegisterLayout):
    cap = qubit_cap()
    if layout.qubits > cap:
        raise ValidationError(
            f"register of {layout.qubits} qubits exceeds the cap of {cap} "
            "(raise DARWIN_MAX_QUBITS to override)"
        )


@dataclass(frozen=True)
class StateVector:
    """Pure state on a register; amplitudes must be normalized."""

    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_cap(self.layout)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.layout.dim:
            raise ValidationError(
                f"amplitude vector of length {amps.shape[0]} does not match dim {self.layout.dim}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state vector norm^2 = {norm!r} is not 1 within {NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD operator on a labeled register.

    Construction checks only shape and the register cap; the expensive
    invariants live in :meth:`check` so hot loops (channel iteration)
    can validate at the cadence they choose.  Instances are treated as
    immutable; never write into ``mat``.
    """

    layout: RegisterLayout
    mat: np.ndarray

    def __post_init__(self):
        _check_cap(self.layout)
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (self.layout.dim, self.layout.dim):
            raise ValidationError(f"matrix shape {m.shape} does not match dim {self.layout.dim}")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.mat - self.mat.conj().T)))

    def check(self, psd: bool = True, herm_tol: float = HERMITICITY_TOL,
              trace_tol: float = TRACE_TOL, psd_tol: float = PSD_TOL) -> "DensityMatrix":
        """Validate the density-matrix invariants, returning self."""
        res = self.hermiticity_residual()
        if res > herm_tol:
            raise ValidationError(f"not Hermitian: max|M - M^+| = {res:.3e} > {herm_tol:.0e}")
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise ValidationError(f"trace {tr!r} is not 1 within {trace_tol:.0e}")
        if psd:
            lo = float(np.min(np.linalg.eigvalsh(_hermitize(self.mat))))
            if lo < -psd_tol:
                raise PSDViolationError(f"minimum eigenvalue {lo:.3e} < -{psd_tol:.0e}")
        return self


def _hermitize(mat: np.ndarray) -> np.ndarray:
    return (mat + mat.conj().T) / 2.0


def _as_matrix(op) -> np.ndarray:
    if isinstance(op, DensityMatrix):
        return op.mat
    return np.asarray(op, dtype=complex)


def pure_density(layout: RegisterLayout, amplitudes) -> DensityMatrix:
    return StateVector(layout, amplitudes).to_density()


def basis_density(layout: RegisterLayout, index: int) -> DensityMatrix:
    """Projector onto a single computational basis state."""
    if not 0 <= index < layout.dim:
        raise ValidationError(f"basis index {index} out of range")
    amps = np.zeros(layout.dim, dtype=complex)
    amps[index] = 1.0
    return pure_density(layout, amps)


def registry_density(n: int, y: int) -> DensityMatrix:
    """Environment-only registry state |y><y| on n qubits."""
    return basis_density(RegisterLayout(0, n), y)


def maximally_mixed(layout: RegisterLayout) -> DensityMatrix:
    _check_cap(layout)
    return DensityMatrix(layout, np.eye(layout.dim, dtype=complex) / layout.dim)


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product, a's register first.

    The fixed system-most-significant ordering only survives when a's
    environment block or b's system block is empty.
    """
    if a.layout.n > 0 and b.layout.k > 0:
        raise ValidationError(
            "cannot concatenate: left register has environment qubits and "
            "right register has system qubits, which would interleave blocks"
        )
    layout = RegisterLayout(a.layout.k + b.layout.k, a.layout.n + b.layout.n)
    _check_cap(layout)
    return DensityMatrix(layout, np.kron(a.mat, b.mat))


def _default_trace_order(discard: set[int]) -> tuple[int, ...]:
    # right-to-left: highest global index (rightmost qubit) first
    return tuple(sorted(discard, reverse=True))


def partial_trace(rho: DensityMatrix, keep, order=None) -> DensityMatrix:
    """Trace out every qubit not in ``keep``.

    ``order`` is the sequence in which the discarded qubits are traced
    out (default right to left).  A single partial trace is independent
    of that order; the argument exists because which qubits remain at
    intermediate fragment sizes is order-dependent, and callers that
    sweep fragments pass explicit orders for validation.
    """
    layout = rho.layout
    keep = sorted(set(keep))
    for q in keep:
        layout.check_qubit(q)
    if not keep:
        raise ValidationError("keep set must contain at least one qubit")
    discard = set(range(layout.qubits)) - set(keep)
    if order is None:
        order = _default_trace_order(discard)
    else:
        order = tuple(order)
        if sorted(order) != sorted(discard):
            raise ValidationError(
                f"trace order {order} is not a permutation of the discarded qubits {sorted(discard)}"
            )
    if not discard:
        return rho

    q = layout.qubits
    tensor = rho.mat.reshape([2] * (2 * q))
    # contract each discarded ket axis with its bra partner in one einsum
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    ket = {}
    bra = {}
    pos = 0
    for g in range(q):
        if g in discard:
            ket[g] = bra[g] = letters[pos]
            pos += 1
        else:
            ket[g] = letters[pos]
            bra[g] = letters[pos + 1]
            pos += 2
    spec_in = "".join(ket[g] for g in range(q)) + "".join(bra[g] for g in range(q))
    spec_out = "".join(ket[g] for g in keep) + "".join(bra[g] for g in keep)
    reduced = np.einsum(f"{spec_in}->{spec_out}", tensor)

    new_k = sum(1 for g in keep if g < layout.k)
    new_layout = RegisterLayout(new_k, len(keep) - new_k)
    d = new_layout.dim
    return DensityMatrix(new_layout, reduced.reshape(d, d))


def spectrum(rho) -> np.ndarray:
    """Real eigenvalues, descending, of a (near-)Hermitian operator.

    Density-matrix inputs additionally get their trace and positivity
    checked.  Eigenvalues in [-1e-10, 0) are clamped to 0.
    """
    mat = _as_matrix(rho)
    res = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    if res > 1e-8:
        raise ValidationError(f"operator is not Hermitian: residual {res:.3e}")
    try:
        vals = np.linalg.eigvalsh(_hermitize(mat))
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(
            f"eigendecomposition failed (hermiticity residual {res:.3e}): {exc}"
        ) from exc
    vals = vals[::-1].copy()
    if isinstance(rho, DensityMatrix):
        lo = float(vals.min())
        if lo < -PSD_TOL:
            raise PSDViolationError(f"density matrix has eigenvalue {lo:.3e} < -{PSD_TOL:.0e}")
        total = float(vals.sum())
        if abs(total - 1.0) > SPECTRUM_SUM_TOL:
            raise NumericalError(f"spectrum sums to {total!r}, not 1 within {SPECTRUM_SUM_TOL:.0e}")
    vals[(vals < 0) & (vals >= -EIGENVALUE_CLAMP)] = 0.0
    if float(vals.min(initial=0.0)) < -EIGENVALUE_CLAMP:
        raise PSDViolationError(
            f"eigenvalue {float(vals.min()):.3e} below the clamping window; upstream state is broken"
        )
    return vals


def shannon_entropy(probabilities) -> float:
    """Base-2 Shannon entropy with 0*log(0) = 0 and tiny-negative clamping."""
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    lo = float(p.min(initial=0.0))
    if lo < -EIGENVALUE_CLAMP:
        raise PSDViolationError(f"probability {lo:.3e} < -{EIGENVALUE_CLAMP:.0e}")
    p = np.clip(p, 0.0, None)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def von_neumann_entropy(rho) -> float:
    """Entropy in bits of a density matrix's eigenvalue distribution."""
    return shannon_entropy(spectrum(rho))


def pointer_shannon_entropy(rho) -> float:
    """Shannon entropy of the diagonal in the computational (pointer) basis."""
    mat = _as_matrix(rho)
    return shannon_entropy(np.real(np.diag(mat)))


def hs_inner_product(x, y) -> complex:
    """Hilbert-Schmidt inner product Tr[X Y^+]."""
    xm = _as_matrix(x)
    ym = _as_matrix(y)
    if xm.shape != ym.shape:
        raise ValidationError(f"operator shapes differ: {xm.shape} vs {ym.shape}")
    return complex(np.vdot(ym.ravel(), xm.ravel()))


def hs_norm(x) -> float:
    return float(np.sqrt(max(hs_inner_product(x, x).real, 0.0)))


def trace_distance(a, b) -> float:
    """Half the trace norm of the difference."""
    diff = _hermitize(_as_matrix(a) - _as_matrix(b))
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))
