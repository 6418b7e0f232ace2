"""Connectivity graphs, c-local embeddings, separable A:X layers,
depolarizing/erasure noise, and exact simulation of noisy error-correction
modules.

The classical system X is kept structural: branch labels on a
ClassicalQuantumState, updated by measurements and label maps. Every
channel is evaluated by exact arithmetic on density matrices (never by
sampling); matrices are re-symmetrized and the trace renormalized after
each application to control float drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .qstate import (
    ClassicalQuantumState,
    DensityMatrix,
    PureState,
    Register,
    RegisterLayout,
    max_entangled_state,
)

TRACE_TOL = 1e-9


# ---------------------------------------------------------------------------
# Connectivity graphs and embeddings


class ConnectivityGraph:
    """Undirected graph on the qubit set; no self-loops."""

    def __init__(self, vertices: Sequence[str], edges: Iterable[tuple]):
        self.vertices = tuple(str(v) for v in vertices)
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("duplicate vertices")
        adj: dict = {v: set() for v in self.vertices}
        norm = set()
        for u, v in edges:
            u, v = str(u), str(v)
            if u not in vset or v not in vset:
                raise ValueError(f"edge ({u}, {v}) references unknown vertex")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            adj[u].add(v)
            adj[v].add(u)
            norm.add((u, v) if u <= v else (v, u))
        self.edges = tuple(sorted(norm))
        self.adjacency = {v: frozenset(s) for v, s in adj.items()}

    @property
    def m(self) -> int:
        return len(self.vertices)

    def has_edge(self, u: str, v: str) -> bool:
        return v in self.adjacency.get(u, ())

    def __repr__(self):
        return f"ConnectivityGraph(m={self.m}, edges={len(self.edges)})"


def boundary(graph: ConnectivityGraph, region: Iterable[str]) -> set:
    """Vertex boundary: inner vertices with an outside neighbor plus
    outside vertices with an inside neighbor."""
    region = {str(v) for v in region}
    for v in region:
        if v not in graph.adjacency:
            raise ValueError(f"unknown vertex {v!r}")
    inner = {u for u in region if graph.adjacency[u] - region}
    outer = {v for u in region for v in graph.adjacency[u] if v not in region}
    return inner | outer


@dataclass(frozen=True)
class Embedding:
    """Coordinates eta: vertex -> R^D with locality constant c."""

    coords: dict
    dimension: int
    c: float = 1.0

    def coord_array(self, order: Sequence[str]) -> np.ndarray:
        return np.array([self.coords[v] for v in order], dtype=float)


@dataclass
class EmbeddingReport:
    ok: bool
    worst_pair: tuple | None  # (u, v, distance) with the smallest spacing
    worst_edge: tuple | None  # (u, v, length) with the longest edge
    violations: list = field(default_factory=list)


def validate_embedding(embedding: Embedding, graph: ConnectivityGraph) -> EmbeddingReport:
    """Check unit minimum spacing and edge lengths <= c.

    The spacing check hashes points into unit cells so large instances
    stay linear-time.
    """
    order = graph.vertices
    pts = embedding.coord_array(order)
    if pts.shape[1] != embedding.dimension:
        raise ValueError("coordinate width does not match embedding dimension")
    report = EmbeddingReport(ok=True, worst_pair=None, worst_edge=None)

    cells: dict = {}
    for i, p in enumerate(pts):
        cells.setdefault(tuple(np.floor(p).astype(int)), []).append(i)
    best = (None, None, np.inf)
    for cell, members in cells.items():
        neigh = []
        for delta in np.ndindex(*(3,) * embedding.dimension):
            key = tuple(c + d - 1 for c, d in zip(cell, delta))
            neigh.extend(cells.get(key, []))
        for i in members:
            for j in neigh:
                if j <= i:
                    continue
                dist = float(np.linalg.norm(pts[i] - pts[j]))
                if dist < best[2]:
                    best = (order[i], order[j], dist)
    if best[0] is not None:
        report.worst_pair = best
        if best[2] < 1.0 - 1e-12:
            report.ok = False
            report.violations.append(
                f"spacing violation: |eta({best[0]}) - eta({best[1]})| = {best[2]:.6g} < 1"
            )

    worst_edge = (None, None, 0.0)
    idx = {v: i for i, v in enumerate(order)}
    for u, v in graph.edges:
        length = float(np.linalg.norm(pts[idx[u]] - pts[idx[v]]))
        if length > worst_edge[2]:
            worst_edge = (u, v, length)
    if worst_edge[0] is not None:
        report.worst_edge = worst_edge
        if worst_edge[2] > embedding.c + 1e-12:
            report.ok = False
            report.violations.append(
                f"edge violation: |eta({worst_edge[0]}) - eta({worst_edge[1]})| = "
                f"{worst_edge[2]:.6g} > c = {embedding.c}"
            )
    return report


def grid_graph(shape: Sequence[int]) -> tuple:
    """Full integer grid: vertices "0".."m-1" in row-major order with unit
    axis-aligned edges; returns (graph, embedding) with c = 1."""
    shape = tuple(int(s) for s in shape)
    dim = len(shape)
    m = int(np.prod(shape))
    coords = [np.unravel_index(i, shape) for i in range(m)]
    vertices = [str(i) for i in range(m)]
    edges = []
    for i, cc in enumerate(coords):
        for ax in range(dim):
            if cc[ax] + 1 < shape[ax]:
                nb = list(cc)
                nb[ax] += 1
                edges.append((str(i), str(np.ravel_multi_index(nb, shape))))
    graph = ConnectivityGraph(vertices, edges)
    emb = Embedding(
        coords={str(i): np.array(cc, dtype=float) for i, cc in enumerate(coords)},
        dimension=dim,
        c=1.0,
    )
    return graph, emb


# ---------------------------------------------------------------------------
# Operator application on labelled registers


def _permuted_operator(op: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    d = int(np.prod(dims))
    t = op.reshape(tuple(dims) + tuple(dims))
    t = t.transpose(tuple(perm) + tuple(p + len(dims) for p in perm))
    return t.reshape(d, d)


def _act_axes(t: np.ndarray, positions: Sequence[int], op: np.ndarray, dims_each) -> np.ndarray:
    w = len(positions)
    kt = op.reshape(tuple(dims_each) + tuple(dims_each))
    out = np.tensordot(kt, t, axes=(tuple(range(w, 2 * w)), tuple(positions)))
    return np.moveaxis(out, range(w), positions)


def apply_operator(mat: np.ndarray, dims: Sequence[int], positions: Sequence[int],
                   op: np.ndarray) -> np.ndarray:
    """K rho K^dag with K acting on the tensor factors at ``positions``."""
    positions = list(positions)
    order = sorted(range(len(positions)), key=lambda i: positions[i])
    sorted_pos = [positions[i] for i in order]
    dims_each = [dims[p] for p in sorted_pos]
    if order != list(range(len(positions))):
        op = _permuted_operator(op, [dims[p] for p in positions], order)
    n = len(dims)
    t = mat.reshape(tuple(dims) + tuple(dims))
    t = _act_axes(t, sorted_pos, op, dims_each)
    t = _act_axes(t, [p + n for p in sorted_pos], op.conj(), dims_each)
    d = int(np.prod(dims))
    return t.reshape(d, d)


def apply_unitary_to_vector(vec: np.ndarray, dims: Sequence[int], positions: Sequence[int],
                            op: np.ndarray) -> np.ndarray:
    positions = list(positions)
    order = sorted(range(len(positions)), key=lambda i: positions[i])
    sorted_pos = [positions[i] for i in order]
    if order != list(range(len(positions))):
        op = _permuted_operator(op, [dims[p] for p in positions], order)
    t = vec.reshape(tuple(dims))
    t = _act_axes(t, sorted_pos, op, [dims[p] for p in sorted_pos])
    return t.reshape(-1)


# ---------------------------------------------------------------------------
# Gates, layers, circuits


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Unitary:
    qubits: tuple
    matrix: np.ndarray

    def __init__(self, qubits, matrix):
        object.__setattr__(self, "qubits", tuple(str(q) for q in qubits))
        object.__setattr__(self, "matrix", np.asarray(matrix, dtype=complex))


@dataclass(frozen=True)
class Conditional:
    """Unitary on fixed support selected by the classical label."""

    qubits: tuple
    chooser: Callable[[str], np.ndarray]

    def __init__(self, qubits, chooser):
        object.__setattr__(self, "qubits", tuple(str(q) for q in qubits))
        object.__setattr__(self, "chooser", chooser)


@dataclass(frozen=True)
class Measure:
    qubit: str
    key: str


@dataclass(frozen=True)
class KrausGate:
    qubits: tuple
    operators: tuple
    key: str | None = None

    def __init__(self, qubits, operators, key=None):
        object.__setattr__(self, "qubits", tuple(str(q) for q in qubits))
        object.__setattr__(self, "operators", tuple(np.asarray(k, dtype=complex) for k in operators))
        object.__setattr__(self, "key", key)


@dataclass(frozen=True)
class Relabel:
    """Free classical computation: an arbitrary map on branch labels."""

    func: Callable[[str], str]


Gate = object  # union of the dataclasses above


def reset_gate(qubit: str) -> KrausGate:
    """Reset to |0>: Kraus {|0><0|, |0><1|}; separable and single-qubit."""
    k0 = np.array([[1, 0], [0, 0]], dtype=complex)
    k1 = np.array([[0, 1], [0, 0]], dtype=complex)
    return KrausGate((qubit,), (k0, k1))


def _gate_support(gate) -> tuple:
    if isinstance(gate, (Unitary, Conditional, KrausGate)):
        return gate.qubits
    if isinstance(gate, Measure):
        return (gate.qubit,)
    if isinstance(gate, Relabel):
        return ()
    raise CircuitError(f"unknown gate type {type(gate).__name__}")


@dataclass(frozen=True)
class Layer:
    """One separable A:X channel: simultaneous gates on disjoint supports."""

    gates: tuple

    def __init__(self, gates):
        object.__setattr__(self, "gates", tuple(gates))

    @property
    def support(self) -> tuple:
        out = []
        for g in self.gates:
            out.extend(_gate_support(g))
        return tuple(out)


@dataclass
class LayerReport:
    ok: bool
    violations: list = field(default_factory=list)


def validate_layer(graph: ConnectivityGraph, layer: Layer) -> LayerReport:
    """Locality (supports are cliques of G), disjointness, completeness."""
    report = LayerReport(ok=True)
    seen: set = set()
    for gate in layer.gates:
        supp = _gate_support(gate)
        for q in supp:
            if q not in graph.adjacency:
                report.violations.append(f"gate references unknown qubit {q!r}")
            if q in seen:
                report.violations.append(f"qubit {q!r} used by two gates in one layer")
            seen.add(q)
        for i in range(len(supp)):
            for j in range(i + 1, len(supp)):
                if not graph.has_edge(supp[i], supp[j]):
                    report.violations.append(
                        f"locality violation: ({supp[i]}, {supp[j]}) not an edge"
                    )
        dim = 2 ** len(supp)
        if isinstance(gate, Unitary):
            if gate.matrix.shape != (dim, dim):
                report.violations.append(f"unitary shape {gate.matrix.shape} != {(dim, dim)}")
            elif np.abs(gate.matrix.conj().T @ gate.matrix - np.eye(dim)).max() > TRACE_TOL:
                report.violations.append("unitary completeness violation: U^dag U != I")
        elif isinstance(gate, KrausGate):
            if any(k.shape != (dim, dim) for k in gate.operators):
                report.violations.append("Kraus operator shape mismatch")
            else:
                total = sum(k.conj().T @ k for k in gate.operators)
                if np.abs(total - np.eye(dim)).max() > TRACE_TOL:
                    report.violations.append("Kraus completeness violation: sum K^dag K != I")
        # Measure is complete by construction; Conditional checked at application
    report.ok = not report.violations
    return report


@dataclass
class Circuit:
    """Ordered layers over one connectivity graph."""

    graph: ConnectivityGraph
    layers: tuple

    def __init__(self, graph, layers):
        self.graph = graph
        self.layers = tuple(layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def validate(self) -> LayerReport:
        report = LayerReport(ok=True)
        for i, layer in enumerate(self.layers):
            sub = validate_layer(self.graph, layer)
            report.violations.extend(f"layer {i}: {v}" for v in sub.violations)
        report.ok = not report.violations
        return report


def _write_outcome(label: str, key: str, value) -> str:
    return f"{label}{key}={value};"


def read_outcome(label: str, key: str) -> str | None:
    """Last recorded value for the key in a branch label, if any."""
    needle = f"{key}="
    best = None
    for part in label.split(";"):
        if part.startswith(needle):
            best = part[len(needle):]
    return best


def _branch_apply_gate(label, weight, mat, dims, layout, gate):
    """Apply one gate to one branch; yields (label, weight, matrix)."""
    if isinstance(gate, Relabel):
        yield gate.func(label), weight, mat
        return
    supp = _gate_support(gate)
    positions = layout.positions(supp)
    if isinstance(gate, Unitary):
        yield label, weight, apply_operator(mat, dims, positions, gate.matrix)
        return
    if isinstance(gate, Conditional):
        u = np.asarray(gate.chooser(label), dtype=complex)
        dim = 2 ** len(supp)
        if u.shape != (dim, dim) or np.abs(u.conj().T @ u - np.eye(dim)).max() > TRACE_TOL:
            raise CircuitError(f"conditional gate returned a non-unitary for label {label!r}")
        yield label, weight, apply_operator(mat, dims, positions, u)
        return
    if isinstance(gate, Measure):
        for outcome in (0, 1):
            proj = np.zeros((2, 2), dtype=complex)
            proj[outcome, outcome] = 1.0
            new = apply_operator(mat, dims, positions, proj)
            prob = new.trace().real
            if prob > 1e-14:
                yield _write_outcome(label, gate.key, outcome), weight * prob, new / prob
        return
    if isinstance(gate, KrausGate):
        if gate.key is None:
            acc = np.zeros_like(mat)
            for k in gate.operators:
                acc += apply_operator(mat, dims, positions, k)
            yield label, weight, acc
        else:
            for i, k in enumerate(gate.operators):
                new = apply_operator(mat, dims, positions, k)
                prob = new.trace().real
                if prob > 1e-14:
                    yield _write_outcome(label, gate.key, i), weight * prob, new / prob
        return
    raise CircuitError(f"unknown gate type {type(gate).__name__}")


def apply_layer(state: ClassicalQuantumState, layer: Layer) -> ClassicalQuantumState:
    """One separable channel step; trace preserved within 1e-9."""
    layout = state.layout
    dims = layout.dims
    before = state.total_weight
    items = [(lab, w, dm.matrix) for lab, w, dm in state.branches]
    for gate in layer.gates:
        next_items = []
        for lab, w, mat in items:
            next_items.extend(_branch_apply_gate(lab, w, mat, dims, layout, gate))
        items = next_items
    branches = []
    for lab, w, mat in items:
        mat = (mat + mat.conj().T) / 2
        tr = mat.trace().real
        if w * tr <= 1e-16:
            continue
        branches.append((lab, w * tr, DensityMatrix(layout, mat / tr, validate=False)))
    out = ClassicalQuantumState(layout, branches, validate=False).merged()
    if abs(out.total_weight - before) > TRACE_TOL:
        raise CircuitError(
            f"trace not preserved by layer: {before} -> {out.total_weight}"
        )
    return out


def apply_circuit(state: ClassicalQuantumState, circuit: Circuit) -> ClassicalQuantumState:
    for layer in circuit.layers:
        state = apply_layer(state, layer)
    return state


# ---------------------------------------------------------------------------
# Noise


@dataclass(frozen=True)
class Depolarize:
    """Single-qubit depolarizing on every listed qubit (X untouched)."""

    p: float
    qubits: tuple

    def __init__(self, p, qubits):
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        object.__setattr__(self, "p", float(p))
        object.__setattr__(self, "qubits", tuple(str(q) for q in qubits))


@dataclass(frozen=True)
class Erase:
    """Replace the region by the maximally mixed state; depolarize the rest."""

    region: tuple
    p: float
    qubits: tuple

    def __init__(self, region, p, qubits):
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        region = tuple(str(q) for q in region)
        qubits = tuple(str(q) for q in qubits)
        if not set(region) <= set(qubits):
            raise ValueError("erase region must be a subset of the noise qubits")
        object.__setattr__(self, "region", region)
        object.__setattr__(self, "p", float(p))
        object.__setattr__(self, "qubits", qubits)


_DEP_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _depolarize_matrix(mat, dims, pos, p):
    # N_p(rho) = (1 - 3p/4) rho + (p/4)(X rho X + Y rho Y + Z rho Z)
    out = (1.0 - 0.75 * p) * mat
    for sigma in _DEP_PAULIS[1:]:
        out += 0.25 * p * apply_operator(mat, dims, [pos], sigma)
    return out


def _erase_qubit_matrix(mat, dims, pos):
    # replace-with-I/2: rho -> I/2 (x) tr_q rho, via four Kraus |i><j|/sqrt(2)
    out = np.zeros_like(mat)
    for i in (0, 1):
        for j in (0, 1):
            k = np.zeros((2, 2), dtype=complex)
            k[i, j] = 1.0 / np.sqrt(2.0)
            out += apply_operator(mat, dims, [pos], k)
    return out


def noise_apply(state, mode) -> ClassicalQuantumState:
    """Apply a noise mode branch-by-branch with exact channel arithmetic."""
    if isinstance(state, DensityMatrix):
        state = ClassicalQuantumState.from_density(state)
    layout = state.layout
    dims = layout.dims
    if isinstance(mode, Depolarize):
        erase_set: tuple = ()
        dep_set = mode.qubits
        p = mode.p
    elif isinstance(mode, Erase):
        erase_set = mode.region
        dep_set = tuple(q for q in mode.qubits if q not in set(mode.region))
        p = mode.p
    else:
        raise CircuitError(f"unknown noise mode {type(mode).__name__}")
    branches = []
    for lab, w, dm in state.branches:
        mat = dm.matrix
        for q in erase_set:
            mat = _erase_qubit_matrix(mat, dims, layout.position(q))
        if p > 0.0:
            for q in dep_set:
                mat = _depolarize_matrix(mat, dims, layout.position(q), p)
        mat = (mat + mat.conj().T) / 2
        tr = mat.trace().real
        branches.append((lab, w * tr, DensityMatrix(layout, mat / tr, validate=False)))
    out = ClassicalQuantumState(layout, branches, validate=False)
    if abs(out.total_weight - state.total_weight) > TRACE_TOL:
        raise CircuitError("trace not preserved by noise application")
    return out


# ---------------------------------------------------------------------------
# Error-correction modules


@dataclass
class EcModule:
    """J rounds of (depolarizing noise on A, then a separable local circuit).

    ``data_qubits`` orders the n data legs of the encoder; the encoder is
    an isometry 2^k -> 2^n. The reference register R never sees noise or
    gates.
    """

    graph: ConnectivityGraph
    rounds: tuple
    data_qubits: tuple
    encoder: np.ndarray
    p: float
    name: str = "module"

    def __post_init__(self):
        self.rounds = tuple(self.rounds)
        self.data_qubits = tuple(str(q) for q in self.data_qubits)
        self.encoder = np.asarray(self.encoder, dtype=complex)
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not set(self.data_qubits) <= set(self.graph.vertices):
            raise ValueError("data qubits must be graph vertices")
        dim_n, dim_k = self.encoder.shape
        if dim_n != 2 ** len(self.data_qubits):
            raise ValueError("encoder row dimension must be 2^n")
        if np.abs(self.encoder.conj().T @ self.encoder - np.eye(dim_k)).max() > 1e-9:
            raise ValueError("encoder is not an isometry")

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def n(self) -> int:
        return len(self.data_qubits)

    @property
    def k(self) -> int:
        return int(round(np.log2(self.encoder.shape[1])))

    @property
    def rounds_count(self) -> int:
        return len(self.rounds)

    @property
    def depth(self) -> int:
        return max((c.depth for c in self.rounds), default=0)

    def validate(self) -> LayerReport:
        report = LayerReport(ok=True)
        for j, circ in enumerate(self.rounds):
            sub = circ.validate()
            report.violations.extend(f"round {j}: {v}" for v in sub.violations)
        report.ok = not report.violations
        return report

    def state_layout(self) -> RegisterLayout:
        regs = [Register("R", self.encoder.shape[1])]
        regs.extend(Register(v, 2) for v in self.graph.vertices)
        return RegisterLayout(regs)

    def target_state(self) -> PureState:
        """(I_R (x) U)(Phi_RL) on registers R + data qubits (data order)."""
        dk = self.encoder.shape[1]
        phi = max_entangled_state(self.k, "R", "L").vector.reshape(dk, dk)
        enc = (self.encoder @ phi.T).T  # rows: R index, cols: code index
        regs = [Register("R", dk)] + [Register(q, 2) for q in self.data_qubits]
        return PureState(RegisterLayout(regs), enc.ravel(), validate=False)


def _initial_cq_state(module: EcModule, input_state) -> ClassicalQuantumState:
    layout = module.state_layout()
    others = [v for v in module.graph.vertices if v not in set(module.data_qubits)]
    if input_state is None:
        prepared = module.target_state()
    elif isinstance(input_state, PureState):
        prepared = input_state
    else:
        raise CircuitError("input_state must be a PureState on R + data qubits")
    if "R" not in prepared.layout:
        # trivial reference register; only sensible when the code has k = 0
        regs = (Register("R", module.encoder.shape[1] if module.k == 0 else 1),)
        prepared = PureState(
            RegisterLayout(regs + prepared.layout.registers), prepared.vector,
            validate=False,
        )
    want = ("R",) + module.data_qubits
    if prepared.layout.labels != want:
        prepared = prepared.permuted([lab for lab in want if lab in prepared.layout.labels])
        if prepared.layout.labels != want:
            raise CircuitError(f"input state registers {prepared.layout.labels} != {want}")
    vec = prepared.vector
    if others:
        zeros = np.zeros(2 ** len(others), dtype=complex)
        zeros[0] = 1.0
        vec = np.kron(vec, zeros)
    pre_regs = list(prepared.layout.registers) + [Register(v, 2) for v in others]
    full = PureState(RegisterLayout(pre_regs), vec, validate=False)
    full = full.permuted(("R",) + module.graph.vertices)
    if full.layout != layout:
        raise CircuitError("internal layout mismatch")
    return ClassicalQuantumState.from_density(full.to_density())


def simulate_module(
    module: EcModule,
    input_state: PureState | None = None,
    erased: tuple | None = None,
) -> ClassicalQuantumState:
    """Run the module: preparation, then J rounds of noise-then-layers.

    ``erased=(region, round_index)`` substitutes the erase-then-depolarize
    channel N_Gamma for the product depolarizing noise at that round; the
    branch is computed exactly, never sampled. Output lives on R + A with
    classical branch labels.
    """
    report = module.validate()
    if not report.ok:
        raise CircuitError("module failed validation: " + "; ".join(report.violations))
    total_qubits = module.m + module.k
    if total_qubits > 12:
        raise CircuitError("simulation limited to about 12 total qubits")
    state = _initial_cq_state(module, input_state)
    qubits = module.graph.vertices
    for j, circ in enumerate(module.rounds):
        if erased is not None and erased[1] == j:
            state = noise_apply(state, Erase(tuple(erased[0]), module.p, qubits))
        else:
            state = noise_apply(state, Depolarize(module.p, qubits))
        state = apply_circuit(state, circ)
    return state


def logical_error_rate(module: EcModule, decoder=None) -> float:
    """delta = 1 - F(recovered state on R+A', encoded target).

    The default decoder traces out the ancilla and the classical record
    and compares against the pure encoded target directly.
    """
    final = simulate_module(module)
    target = module.target_state()
    if decoder is None:
        avg = final.average_state()
        rho_out = avg.reduced(("R",) + tuple(
            v for v in module.graph.vertices if v in set(module.data_qubits)
        ))
        rho_out = rho_out.permuted(("R",) + module.data_qubits)
    else:
        rho_out = decoder(final)
        if rho_out.layout.labels != ("R",) + module.data_qubits:
            rho_out = rho_out.permuted(("R",) + module.data_qubits)
    t = target.vector
    fid = float(np.real(t.conj() @ rho_out.matrix @ t))
    return min(max(1.0 - fid, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Choi matrices (used by the mixture-identity checks)


def choi_matrix(channel: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Unnormalized Choi matrix sum_ij channel(E_ij) (x) E_ij."""
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = 1.0
            out += np.kron(channel(e), e)
    return out


# ---------------------------------------------------------------------------
# Circuit file format


class CircuitFileError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _parse_complex(tok: str, line_no: int) -> complex:
    try:
        return complex(tok)
    except ValueError:
        raise CircuitFileError(line_no, f"bad complex number {tok!r}") from None


def parse_circuit_lines(lines: Iterable[str]) -> Circuit:
    """Line-oriented circuit format.

    ``qubits m`` then ``edge u v`` lines, then ``layer`` blocks whose gate
    lines are one of::

        u2 <16 complex entries, row-major> on <u> <v>
        meas <q> -> <label>
        kraus <count> on <q...> : <count * (2^w)^2 complex entries>
    """
    m = None
    edges = []
    layers: list = []
    current: list | None = None
    for line_no, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        toks = text.split()
        head = toks[0]
        if head == "qubits":
            if m is not None:
                raise CircuitFileError(line_no, "duplicate qubits line")
            if len(toks) != 2 or not toks[1].isdigit():
                raise CircuitFileError(line_no, "expected: qubits <m>")
            m = int(toks[1])
        elif head == "edge":
            if m is None:
                raise CircuitFileError(line_no, "edge before qubits line")
            if len(toks) != 3:
                raise CircuitFileError(line_no, "expected: edge <u> <v>")
            for tok in toks[1:3]:
                if not tok.isdigit() or int(tok) >= m:
                    raise CircuitFileError(
                        line_no, f"edge vertex {tok!r} outside 0..{m - 1}"
                    )
            edges.append((toks[1], toks[2]))
        elif head == "layer":
            if m is None:
                raise CircuitFileError(line_no, "layer before qubits line")
            if current is not None:
                layers.append(Layer(current))
            current = []
        elif head == "u2":
            if current is None:
                raise CircuitFileError(line_no, "gate outside a layer block")
            if len(toks) != 1 + 16 + 3 or toks[17] != "on":
                raise CircuitFileError(
                    line_no, "expected: u2 <16 entries> on <u> <v>"
                )
            entries = [_parse_complex(t, line_no) for t in toks[1:17]]
            current.append(Unitary((toks[18], toks[19]), np.array(entries).reshape(4, 4)))
        elif head == "meas":
            if current is None:
                raise CircuitFileError(line_no, "gate outside a layer block")
            if len(toks) != 4 or toks[2] != "->":
                raise CircuitFileError(line_no, "expected: meas <q> -> <label>")
            current.append(Measure(toks[1], toks[3]))
        elif head == "kraus":
            if current is None:
                raise CircuitFileError(line_no, "gate outside a layer block")
            if len(toks) < 5 or toks[2] != "on" or ":" not in toks:
                raise CircuitFileError(
                    line_no, "expected: kraus <count> on <q...> : <entries>"
                )
            try:
                count = int(toks[1])
            except ValueError:
                raise CircuitFileError(line_no, "bad kraus count") from None
            sep = toks.index(":")
            qubits = toks[3:sep]
            if not qubits:
                raise CircuitFileError(line_no, "kraus gate needs at least one qubit")
            dim = 2 ** len(qubits)
            entries = [_parse_complex(t, line_no) for t in toks[sep + 1:]]
            if len(entries) != count * dim * dim:
                raise CircuitFileError(
                    line_no,
                    f"expected {count * dim * dim} entries, found {len(entries)}",
                )
            ops = [
                np.array(entries[i * dim * dim:(i + 1) * dim * dim]).reshape(dim, dim)
                for i in range(count)
            ]
            current.append(KrausGate(tuple(qubits), ops))
        else:
            raise CircuitFileError(line_no, f"unknown directive {head!r}")
    if m is None:
        raise CircuitFileError(0, "missing qubits line")
    if current is not None:
        layers.append(Layer(current))
    graph = ConnectivityGraph([str(i) for i in range(m)], edges)
    circuit = Circuit(graph, layers)
    report = circuit.validate()
    if not report.ok:
        raise CircuitFileError(0, "; ".join(report.violations))
    return circuit


def read_circuit_file(path) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_circuit_lines(fh)
