"""Interaction digraphs: which qubit pairs interact and with what weight.

Edges are (control, target) pairs of global qubit indices.  Controls
may be system or environment qubits; targets are always environment
qubits, so system qubits only ever decohere their targets and are
never acted upon.  Edge weights are a probability distribution used by
the iterated channel; the asymptotic behavior is weight-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError
from .qstate import RegisterLayout


class DigraphKind(Enum):
    KOENIG = "koenig"
    ENV_STRONGLY_CONNECTED = "env_strongly_connected"
    OTHER = "other"


@dataclass(frozen=True)
class DigraphClass:
    tag: DigraphKind
    e_binding_count: int


@dataclass(frozen=True)
class InteractionDigraph:
    layout: RegisterLayout
    edges: tuple[tuple[int, int], ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        layout = self.layout
        if layout.k < 1:
            raise ValidationError("interaction digraphs require at least one system qubit")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        probs = tuple(float(p) for p in self.probabilities)
        if len(edges) != len(probs):
            raise ValidationError(f"{len(edges)} edges but {len(probs)} probabilities")
        if not edges:
            raise ValidationError("digraph needs at least one edge")
        seen = set()
        for (i, j) in edges:
            layout.check_qubit(i)
            layout.check_qubit(j)
            if i == j:
                raise ValidationError(f"self-loop on qubit {i}")
            if j < layout.k:
                raise ValidationError(f"edge ({i}, {j}) targets a system qubit")
            if (i, j) in seen:
                raise ValidationError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        for p in probs:
            if p <= 0.0:
                raise ValidationError(f"edge probability {p} must be positive")
        total = sum(probs)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"edge probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "probabilities", probs)

    @property
    def env_edges(self) -> tuple[tuple[int, int], ...]:
        k = self.layout.k
        return tuple(e for e in self.edges if e[0] >= k)


def _uniform(edges) -> tuple[float, ...]:
    m = len(edges)
    return tuple(1.0 / m for _ in edges)


def koenig(k: int, n: int) -> InteractionDigraph:
    """Complete bipartite digraph: every system qubit controls every
    environment qubit, uniform weights, no environment bindings."""
    if k < 1 or n < 1:
        raise ValidationError(f"koenig digraph needs k >= 1 and n >= 1, got k={k}, n={n}")
    layout = RegisterLayout(k, n)
    edges = tuple((i, k + j) for i in range(k) for j in range(n))
    return InteractionDigraph(layout, edges, _uniform(edges))


def complete_env(k: int, n: int) -> InteractionDigraph:
    """Koenig digraph plus every directed environment-environment edge."""
    base = koenig(k, n)
    extra = tuple(
        (k + a, k + b) for a in range(n) for b in range(n) if a != b
    )
    edges = base.edges + extra
    return InteractionDigraph(base.layout, edges, _uniform(edges))


def with_env_bindings(g: InteractionDigraph, extra, probabilities=None) -> InteractionDigraph:
    """Merge extra environment-environment edges into a digraph.

    Weights are re-uniformized over the merged edge set unless an
    explicit distribution is supplied.
    """
    k = g.layout.k
    extra = tuple((int(i), int(j)) for i, j in extra)
    for (i, j) in extra:
        if i < k or j < k:
            raise ValidationError(f"binding ({i}, {j}) must connect environment qubits")
    edges = g.edges + extra
    if probabilities is None:
        probabilities = _uniform(edges)
    return InteractionDigraph(g.layout, edges, tuple(probabilities))


def _strongly_connected(vertices: list[int], arcs: set[tuple[int, int]]) -> bool:
    """Every vertex reaches every other along directed arcs."""
    if len(vertices) <= 1:
        return False  # a closed arrow path needs at least two qubits

    adj = {v: [] for v in vertices}
    radj = {v: [] for v in vertices}
    for (a, b) in arcs:
        adj[a].append(b)
        radj[b].append(a)

    def reach(start, table):
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in table[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    root = vertices[0]
    return len(reach(root, adj)) == len(vertices) and len(reach(root, radj)) == len(vertices)


def classify(g: InteractionDigraph) -> DigraphClass:
    """Koenig when no environment bindings exist; strongly connected when
    the binding subgraph joins all n environment qubits in one closed
    component; anything else routes to the numeric attractor solver."""
    env = g.env_edges
    if not env:
        return DigraphClass(DigraphKind.KOENIG, 0)
    k = g.layout.k
    vertices = list(range(k, k + g.layout.n))
    if _strongly_connected(vertices, set(env)):
        return DigraphClass(DigraphKind.ENV_STRONGLY_CONNECTED, len(env))
    return DigraphClass(DigraphKind.OTHER, len(env))
