"""Everything downstream of an evolved state: entropy triples, mutual
information over environment fragments, partial-information tables,
redundancy, plateau checks, and the closed-form validation probes.

Fragment bookkeeping: a trace order is the sequence of environment
labels (1..n) in which qubits are traced out.  The fragment at size L
consists of the last L labels of that order, i.e. the survivors after
n - L traces.  The default order is right to left, so the fragment at
size L is E_1..E_L.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attractor import Parity, Regime, SymmetryStates, analytic_output_state
from .errors import PSDViolationError, ValidationError
from .inputs import (
    InputStateSpec,
    MaximallyMixed,
    MixtureOfRegistries,
    Registry,
    SuperpositionOfRegistries,
    build_input_state,
)
from .qstate import (
    DensityMatrix,
    RegisterLayout,
    partial_trace,
    pointer_shannon_entropy,
    shannon_entropy,
    spectrum,
    trace_distance,
    von_neumann_entropy,
)

RATIO_SLACK = 1e-6


def right_to_left_order(n: int) -> tuple[int, ...]:
    return tuple(range(n, 0, -1))


def normalize_trace_order(n: int, order) -> tuple[int, ...]:
    if order is None or (isinstance(order, str) and order == "right_to_left"):
        return right_to_left_order(n)
    order = tuple(int(t) for t in order)
    if sorted(order) != list(range(1, n + 1)):
        raise ValidationError(f"trace order {order} is not a permutation of 1..{n}")
    return order


def fragment_labels(n: int, L: int, order) -> tuple[int, ...]:
    """Environment labels that survive once n - L qubits are traced out."""
    order = normalize_trace_order(n, order)
    if not 1 <= L <= n:
        raise ValidationError(f"fragment size {L} outside 1..{n}")
    return tuple(sorted(order[n - L:]))


def mutual_information(rho_se: DensityMatrix, L: int, trace_order=None
                       ) -> tuple[float, float, float, float]:
    """Entropy triple and mutual information for the size-L fragment.

    Returns (H_S, H_E, H_SE, I) with I = H_S + H_E - H_SE.
    """
    layout = rho_se.layout
    labels = fragment_labels(layout.n, L, trace_order)
    env_qubits = [layout.env_qubit(t) for t in labels]
    s_qubits = list(range(layout.k))

    rho_s = partial_trace(rho_se, s_qubits)
    rho_e = partial_trace(rho_se, env_qubits)
    if L == layout.n:
        rho_sel = rho_se
    else:
        rho_sel = partial_trace(rho_se, s_qubits + env_qubits)
    h_s = von_neumann_entropy(rho_s)
    h_e = von_neumann_entropy(rho_e)
    h_se = von_neumann_entropy(rho_sel)
    return h_s, h_e, h_se, h_s + h_e - h_se


@dataclass(frozen=True)
class PipRow:
    L: int
    f: float
    h_s: float
    h_e: float
    h_se: float
    mi: float
    ratio: float


@dataclass(frozen=True)
class PipTable:
    """Per-fragment-size record of the entropies and the ratio to the
    pointer entropy of the output system state."""

    rows: tuple[PipRow, ...]
    h_s_class: float
    trace_order: tuple[int, ...]
    model: str = ""
    parity: str = ""

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def h_class_defined(self) -> bool:
        return self.h_s_class > 0.0

    def row(self, L: int) -> PipRow:
        return self.rows[L - 1]


def pip(rho_se_out: DensityMatrix, trace_order=None, model: str = "",
        parity: str = "") -> PipTable:
    """Partial-information table over every fragment size L = 1..n.

    The pointer entropy is always taken from the diagonal of the output
    system marginal.  When it vanishes the ratio column is NaN and the
    table is flagged via ``h_class_defined``.
    """
    layout = rho_se_out.layout
    if layout.k < 1 or layout.n < 1:
        raise ValidationError("partial-information tables need k >= 1 and n >= 1")
    order = normalize_trace_order(layout.n, trace_order)
    rho_s = partial_trace(rho_se_out, range(layout.k))
    h_class = pointer_shannon_entropy(rho_s)
    rows = []
    for L in range(1, layout.n + 1):
        h_s, h_e, h_se, mi = mutual_information(rho_se_out, L, order)
        ratio = mi / h_class if h_class > 0 else float("nan")
        rows.append(PipRow(L, L / layout.n, h_s, h_e, h_se, mi, ratio))
    return PipTable(tuple(rows), h_class, order, model, parity)


@dataclass(frozen=True)
class RedundancyReport:
    delta: float
    f_star: float
    redundancy: float
    plateau_found: bool


def redundancy(table: PipTable, delta: float = 0.01) -> RedundancyReport:
    """Smallest fragment fraction whose information reaches (1 - delta)
    of the pointer entropy; the redundancy is its reciprocal."""
    if not 0.0 < delta < 0.5:
        raise ValidationError(f"delta = {delta} outside (0, 0.5)")
    if not table.h_class_defined:
        return RedundancyReport(delta, float("nan"), float("nan"), False)
    threshold = (1.0 - delta) * table.h_s_class
    for row in table.rows:
        if row.mi >= threshold:
            return RedundancyReport(delta, row.f, 1.0 / row.f, True)
    return RedundancyReport(delta, float("nan"), float("nan"), False)


def plateau_condition(table: PipTable, l_range: tuple[int, int],
                      slack: float = RATIO_SLACK) -> tuple[bool, dict[int, float]]:
    """Check ratio >= 1 - slack across a fragment-size range.

    Also returns the per-size margin H_E - H_SE, since the sufficient
    condition for the plateau is that the fragment entropy dominates
    the joint entropy.
    """
    lo, hi = l_range
    if not 1 <= lo <= hi <= table.n:
        raise ValidationError(f"range {l_range} invalid for a table with n = {table.n}")
    margins = {}
    ok = True
    for L in range(lo, hi + 1):
        row = table.row(L)
        margins[L] = row.h_e - row.h_se
        if not table.h_class_defined or row.ratio < 1.0 - slack:
            ok = False
    return ok, margins


# ---------------------------------------------------------------------------
# one-pass catalogue: input families with closed-form entropy profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogueRow:
    """A catalogued environment preparation plus the closed-form entropy
    profile of its one-pass output, for right-to-left tracing."""

    index: int
    spec: InputStateSpec
    h_cl: float

    def expected_h_s(self, L: int) -> float:
        if self.index == 6:
            return 0.0
        return self.h_cl

    def expected_h_e(self, L: int) -> float:
        n, h = self.spec.n, self.h_cl
        last = 1.0 if L == n else 0.0
        if self.index == 1:
            return h + last
        if self.index == 2:
            return 1.0 + (0.0 if L == 1 else h)
        if self.index == 3:
            return 1.0
        if self.index == 4:
            return float(L)
        if self.index == 5:
            return 1.0 + last * h
        return 1.0 - last

    def expected_h_se(self, L: int) -> float:
        n, h = self.spec.n, self.h_cl
        bulk = 0.0 if L == n else h
        if self.index == 1:
            return bulk + (1.0 if L == n else 0.0)
        if self.index in (2, 3, 4, 5):
            base = float(L) if self.index == 4 else 1.0
            return base + bulk
        return 1.0 - (1.0 if L == n else 0.0)


def catalogue_zurek(row: int, n: int, a: complex, b: complex) -> CatalogueRow:
    """The six catalogued single-system-qubit environment preparations.

    1: registry pair differing in the last qubit      (plateau survives)
    2: registry pair differing in the first qubit     (plateau broken at L=1)
    3: registry pair 0..0 / 1..1                      (no plateau)
    4: maximally mixed                                (information-free)
    5: registry pair 0..0 / 1..10                     (no plateau)
    6: registry superposition (0..0 + 1..1)/sqrt(2)   (no decoherence at all)

    The closed forms assume right-to-left tracing.  Rows 1 and 2 are
    stated here as derived from the reduced output states directly; see
    the tests, which verify all six rows against dense computation.
    """
    if row not in range(1, 7):
        raise ValidationError(f"catalogue row {row} outside 1..6")
    if n < 2:
        raise ValidationError("catalogue rows need n >= 2")
    amps = np.array([a, b], dtype=complex)
    half = 0.5
    if row == 1:
        e = MixtureOfRegistries(((half, 0), (half, 1)))
    elif row == 2:
        e = MixtureOfRegistries(((half, 0), (half, 2 ** (n - 1))))
    elif row == 3:
        e = MixtureOfRegistries(((half, 0), (half, 2 ** n - 1)))
    elif row == 4:
        e = MaximallyMixed()
    elif row == 5:
        e = MixtureOfRegistries(((half, 0), (half, 2 ** n - 2)))
    else:
        r = 1 / np.sqrt(2)
        e = SuperpositionOfRegistries(((r, 0), (r, 2 ** n - 1)))
    spec = InputStateSpec(1, n, amps, e)
    h_cl = shannon_entropy([abs(a) ** 2, abs(b) ** 2])
    return CatalogueRow(row, spec, h_cl)


# ---------------------------------------------------------------------------
# gate-angle uniqueness probe
# ---------------------------------------------------------------------------

def symmetry_partitioned_state(amplitudes, L: int, phi: float) -> DensityMatrix:
    """Pointer-diagonal state with the lower half of the system patterns
    tied to the +1 gate eigenstate and the upper half to the -1 one,
    on an L-qubit environment fragment."""
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    dk = amps.shape[0]
    k = int(np.log2(dk))
    if 2 ** k != dk:
        raise ValidationError("amplitude count must be a power of two")
    norm = float(np.sum(np.abs(amps) ** 2))
    if abs(norm - 1.0) > 1e-12:
        raise ValidationError(f"amplitudes norm^2 = {norm!r} is not 1")
    sym = SymmetryStates.from_phi(phi)
    kets = [sym.ket_plus, sym.ket_minus]
    proj = []
    for ket in kets:
        vec = np.array([1.0], dtype=complex)
        for _ in range(L):
            vec = np.kron(vec, ket)
        proj.append(np.outer(vec, vec.conj()))
    dn = 2 ** L
    mat = np.zeros((dk * dn, dk * dn), dtype=complex)
    view = mat.reshape(dk, dn, dk, dn)
    for x in range(dk):
        view[x, :, x, :] = abs(amps[x]) ** 2 * proj[0 if x < dk // 2 else 1]
    return DensityMatrix(RegisterLayout(k, L), mat)


def symmetry_sweep(phi_grid, amplitudes) -> np.ndarray:
    """Entropy gap H(S, E) - H(E) of the one-fragment partitioned state,
    per gate angle.  The gap vanishes exactly at the CNOT angle for a
    single balanced system qubit and is positive elsewhere."""
    gaps = []
    for phi in np.asarray(phi_grid, dtype=float):
        rho = symmetry_partitioned_state(amplitudes, 1, phi)
        rho_e = partial_trace(rho, [rho.layout.k])
        gaps.append(von_neumann_entropy(rho) - von_neumann_entropy(rho_e))
    return np.array(gaps)


# ---------------------------------------------------------------------------
# large-environment limit forms
# ---------------------------------------------------------------------------

LIMIT_CASES = (
    "max_pure_registry",
    "max_registry_pair_mixture",
    "max_maximally_mixed",
    "min_excited_registry",
    "min_registry_pair_mixture",
)


@dataclass(frozen=True)
class LimitFormReport:
    case: str
    k: int
    n: int
    distance: float
    ratio_full: float
    ratio_limit: float


def _limit_case(case: str, k: int, n: int) -> tuple[InputStateSpec, Regime, np.ndarray]:
    dk = 2 ** k
    amps = np.full(dk, 1 / np.sqrt(dk), dtype=complex)
    dn = 2 ** n
    t = 2.0 ** (-n)
    eye = np.eye(dn, dtype=complex)

    def diag_blocks(env_ops):
        mat = np.zeros((dk * dn, dk * dn), dtype=complex)
        view = mat.reshape(dk, dn, dk, dn)
        for x, op in enumerate(env_ops):
            view[x, :, x, :] = op
        return mat

    w = abs(amps[0]) ** 2
    if case == "max_pure_registry":
        spec = InputStateSpec(k, n, amps, Registry(0))
        p0 = np.zeros((dn, dn), dtype=complex)
        p0[0, 0] = 1.0
        ops = [w * p0] + [w * t * eye] * (dk - 1)
        return spec, Regime.MAX_KOENIG, diag_blocks(ops)
    if case == "max_registry_pair_mixture":
        if k != 1:
            raise ValidationError("the registry-pair limit form is single-system-qubit")
        spec = InputStateSpec(k, n, amps, MixtureOfRegistries(((0.5, 0), (0.5, dn - 1))))
        rho_e = np.zeros((dn, dn), dtype=complex)
        rho_e[0, 0] = rho_e[-1, -1] = 0.5
        return spec, Regime.MAX_KOENIG, diag_blocks([w * rho_e, w * t * eye])
    if case == "max_maximally_mixed":
        if k != 1:
            raise ValidationError("the maximally-mixed limit form is single-system-qubit")
        spec = InputStateSpec(k, n, amps, MaximallyMixed())
        return spec, Regime.MAX_KOENIG, diag_blocks([w * t * eye, w * t * eye])
    if case == "min_excited_registry":
        spec = InputStateSpec(k, n, amps, Registry(dn - 1))
        return spec, Regime.MIN_STRONG, diag_blocks([w * t * eye] * dk)
    if case == "min_registry_pair_mixture":
        if k != 1:
            raise ValidationError("the registry-pair limit form is single-system-qubit")
        spec = InputStateSpec(k, n, amps, MixtureOfRegistries(((0.5, 0), (0.5, dn - 1))))
        p0 = np.zeros((dn, dn), dtype=complex)
        p0[0, 0] = 1.0
        return spec, Regime.MIN_STRONG, diag_blocks(
            [w * (t / 2 * eye + 0.5 * p0), w * t * eye]
        )
    raise ValidationError(f"unknown limit case {case!r}; expected one of {LIMIT_CASES}")


def limit_form_check(case: str, k: int, n: int,
                     parity: Parity = Parity.EVEN) -> LimitFormReport:
    """Compare the exact asymptotic output with its large-environment
    limit form at finite n: trace distance plus both full-fragment
    information ratios."""
    spec, regime, limit_mat = _limit_case(case, k, n)
    full = analytic_output_state(spec, regime, parity)
    distance = trace_distance(full, limit_mat)

    def ratio_of(mat) -> float:
        rho = DensityMatrix(RegisterLayout(k, n), mat)
        h_s, h_e, h_se, mi = mutual_information(rho, n)
        h_cl = pointer_shannon_entropy(partial_trace(rho, range(k)))
        return mi / h_cl

    return LimitFormReport(case, k, n, distance, ratio_of(full.mat), ratio_of(limit_mat))


# ---------------------------------------------------------------------------
# off-diagonal correlation probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationProbeReport:
    c: complex
    c_boundary: float
    gap: float
    se_spectrum: np.ndarray
    e_spectrum: np.ndarray


def ideal_correlation_probe(a0: complex, a1: complex, n: int, c: complex
                            ) -> CorrelationProbeReport:
    """Entropy gap of the registry-pair-shaped output with its repeated
    off-diagonal entries set to c.

    The off-diagonal block distributes identical entries c along the
    all-zeros and all-ones registry rows, on the columns selected by the
    surviving symmetry combination.  Positivity bounds |c| by
    2^-n |a0 a1|; that boundary value is both the physically realized
    entry and the gap minimizer, and crossing it raises.
    """
    if abs(abs(a0) ** 2 + abs(a1) ** 2 - 1.0) > 1e-12:
        raise ValidationError("|a0|^2 + |a1|^2 must equal 1")
    if n < 2:
        raise ValidationError("the probe needs n >= 2")
    dn = 2 ** n
    t = 2.0 ** (-n)
    weights = np.array([bin(z).count("1") for z in range(dn)])
    even_cols = weights % 2 == 0
    ones_cols = weights % 2 == (n % 2)

    mat = np.zeros((2 * dn, 2 * dn), dtype=complex)
    view = mat.reshape(2, dn, 2, dn)
    view[0, 0, 0, 0] = abs(a0) ** 2 / 2
    view[0, dn - 1, 0, dn - 1] = abs(a0) ** 2 / 2
    if n % 2 == 0:
        diag = np.where(even_cols, 2 * t * abs(a1) ** 2, 0.0)
    else:
        diag = np.full(dn, t * abs(a1) ** 2)
    view[1, np.arange(dn), 1, np.arange(dn)] = diag
    block = np.zeros((dn, dn), dtype=complex)
    block[0, even_cols] = c
    block[dn - 1, ones_cols] = c
    view[0, :, 1, :] = block
    view[1, :, 0, :] = block.conj().T

    rho = DensityMatrix(RegisterLayout(1, n), mat)
    se_spec = np.linalg.eigvalsh((mat + mat.conj().T) / 2)[::-1]
    if float(se_spec.min()) < -1e-10:
        raise PSDViolationError(
            f"entry c = {c!r} breaks positivity (min eigenvalue {float(se_spec.min()):.3e}); "
            f"|c| must not exceed {t * abs(a0 * a1):.3e}"
        )
    se_spec = spectrum(rho)
    rho_e = partial_trace(rho, [1 + i for i in range(n)])
    e_spec = spectrum(rho_e)
    gap = shannon_entropy(se_spec) - shannon_entropy(e_spec)
    return CorrelationProbeReport(
        complex(c), float(t * abs(a0 * a1)), float(gap), se_spec, e_spec
    )
