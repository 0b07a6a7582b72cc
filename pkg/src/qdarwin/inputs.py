"""Declarative descriptions of joint input states rho_SE^in.

A spec is a pure system state (amplitude vector over 2^k patterns)
combined with one environment family, or, for the symmetry-entangled
family, a joint pure state that ties each pointer state to one
eigenstate of the single-qubit gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .qstate import (
    DensityMatrix,
    RegisterLayout,
    StateVector,
    maximally_mixed,
    registry_density,
    tensor_product,
)

NORM_TOL = 1e-12


@dataclass(frozen=True)
class Registry:
    """Computational product state |y><y| of the environment."""

    y: int


@dataclass(frozen=True)
class MixtureOfRegistries:
    """Convex sum of registry projectors: [(weight, y), ...]."""

    terms: tuple[tuple[float, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((float(w), int(y)) for w, y in self.terms)
        )


@dataclass(frozen=True)
class SuperpositionOfRegistries:
    """Pure superposition of registry kets: [(amplitude, y), ...]."""

    terms: tuple[tuple[complex, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((complex(a), int(y)) for a, y in self.terms)
        )


@dataclass(frozen=True)
class MaximallyMixed:
    """Identity / 2^n."""


@dataclass(frozen=True)
class SymmetryEntangled:
    """Joint pure state a|0> x |s1...s1> + b|1> x |s2...s2| with
    s1 = c1|0> + c2|1>, s2 = c2|0> - c1|1>, c2 = sqrt(1 - c1^2)."""

    a: complex
    b: complex
    c1: float


ESpec = Registry | MixtureOfRegistries | SuperpositionOfRegistries | MaximallyMixed | SymmetryEntangled


@dataclass(frozen=True)
class InputStateSpec:
    k: int
    n: int
    s_amplitudes: np.ndarray
    e_spec: ESpec = field(default_factory=MaximallyMixed)

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValidationError(f"input spec needs k >= 1 and n >= 1, got k={self.k}, n={self.n}")
        amps = np.asarray(self.s_amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2 ** self.k:
            raise ValidationError(
                f"system amplitudes have length {amps.shape[0]}, expected {2 ** self.k}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"system amplitudes norm^2 = {norm!r} is not 1")
        object.__setattr__(self, "s_amplitudes", amps)
        self._validate_e_spec()

    def _validate_e_spec(self):
        e = self.e_spec
        top = 2 ** self.n
        if isinstance(e, Registry):
            if not 0 <= e.y < top:
                raise ValidationError(f"registry index {e.y} out of range for n={self.n}")
        elif isinstance(e, MixtureOfRegistries):
            if not e.terms:
                raise ValidationError("mixture needs at least one term")
            total = 0.0
            for w, y in e.terms:
                if w <= 0:
                    raise ValidationError(f"mixture weight {w} must be positive")
                if not 0 <= y < top:
                    raise ValidationError(f"registry index {y} out of range for n={self.n}")
                total += w
            if abs(total - 1.0) > NORM_TOL:
                raise ValidationError(f"mixture weights sum to {total!r}, not 1")
        elif isinstance(e, SuperpositionOfRegistries):
            if not e.terms:
                raise ValidationError("superposition needs at least one term")
            ys = [y for _, y in e.terms]
            if len(set(ys)) != len(ys):
                raise ValidationError("superposition terms must use distinct registries")
            for _, y in e.terms:
                if not 0 <= y < top:
                    raise ValidationError(f"registry index {y} out of range for n={self.n}")
            norm = sum(abs(a) ** 2 for a, _ in e.terms)
            if abs(norm - 1.0) > NORM_TOL:
                raise ValidationError(f"superposition norm^2 = {norm!r} is not 1")
        elif isinstance(e, SymmetryEntangled):
            if self.k != 1:
                raise ValidationError("the symmetry-entangled family is defined for k = 1")
            if not 0.0 < e.c1 < 1.0:
                raise ValidationError(f"c1 = {e.c1} must lie strictly inside (0, 1)")
            norm = abs(e.a) ** 2 + abs(e.b) ** 2
            if abs(norm - 1.0) > NORM_TOL:
                raise ValidationError(f"|a|^2 + |b|^2 = {norm!r} is not 1")
            if not np.allclose(self.s_amplitudes, [e.a, e.b], atol=1e-12):
                raise ValidationError(
                    "for the symmetry-entangled family the system amplitudes must equal (a, b)"
                )
        elif isinstance(e, MaximallyMixed):
            pass
        else:
            raise ValidationError(f"unknown environment family {type(e).__name__}")

    @property
    def layout(self) -> RegisterLayout:
        return RegisterLayout(self.k, self.n)


def symmetry_kets(c1: float) -> tuple[np.ndarray, np.ndarray]:
    """The +1 and -1 eigenvectors of u at the angle with cos(phi/2) = c1."""
    c2 = float(np.sqrt(1.0 - c1 * c1))
    s_plus = np.array([c1, c2], dtype=complex)
    s_minus = np.array([c2, -c1], dtype=complex)
    return s_plus, s_minus


def build_input_state(spec: InputStateSpec) -> DensityMatrix:
    """Materialize the joint density matrix rho_SE^in."""
    layout = spec.layout
    e = spec.e_spec
    if isinstance(e, SymmetryEntangled):
        s_plus, s_minus = symmetry_kets(e.c1)
        plus_n = _kron_power(s_plus, spec.n)
        minus_n = _kron_power(s_minus, spec.n)
        amps = np.concatenate([e.a * plus_n, e.b * minus_n])
        return StateVector(layout, amps).to_density()

    s_layout = RegisterLayout(spec.k, 0)
    rho_s = DensityMatrix(s_layout, np.outer(spec.s_amplitudes, spec.s_amplitudes.conj()))
    if isinstance(e, Registry):
        rho_e = registry_density(spec.n, e.y)
    elif isinstance(e, MixtureOfRegistries):
        mat = np.zeros((2 ** spec.n, 2 ** spec.n), dtype=complex)
        for w, y in e.terms:
            mat[y, y] += w
        rho_e = DensityMatrix(RegisterLayout(0, spec.n), mat)
    elif isinstance(e, SuperpositionOfRegistries):
        amps = np.zeros(2 ** spec.n, dtype=complex)
        for a, y in e.terms:
            amps[y] = a
        rho_e = StateVector(RegisterLayout(0, spec.n), amps).to_density()
    elif isinstance(e, MaximallyMixed):
        rho_e = maximally_mixed(RegisterLayout(0, spec.n))
    else:  # pragma: no cover - guarded in validation
        raise ValidationError(f"unknown environment family {type(e).__name__}")
    return tensor_product(rho_s, rho_e)


def _kron_power(vec: np.ndarray, count: int) -> np.ndarray:
    out = np.array([1.0], dtype=complex)
    for _ in range(count):
        out = np.kron(out, vec)
    return out
