"""Register-labelled density matrices and pure states.

States carry an ordered register layout; the register order fixes the
Kronecker order of the underlying array, and every label-addressed
operation permutes internally, so callers never juggle indices.
All logarithms elsewhere in the package are base 2 (registers count
qubits), and every value here is immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERM_ATOL = 1e-10
PSD_ATOL = 1e-10
TRACE_ATOL = 1e-10

QUANTUM = "quantum"
CLASSICAL = "classical"


def _is_power_of_two(d: int) -> bool:
    return d >= 1 and (d & (d - 1)) == 0


@dataclass(frozen=True)
class Register:
    """One named subsystem: a label, a kind and a dimension."""

    label: str
    dim: int
    kind: str = QUANTUM

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"register {self.label!r}: dimension must be >= 1")
        if self.kind not in (QUANTUM, CLASSICAL):
            raise ValueError(f"register {self.label!r}: unknown kind {self.kind!r}")
        if self.kind == QUANTUM and not _is_power_of_two(self.dim):
            raise ValueError(
                f"register {self.label!r}: quantum dimension {self.dim} is not a power of 2"
            )


class RegisterLayout:
    """Ordered collection of uniquely labelled registers.

    The order defines the tensor (Kronecker) order of matrices and
    vectors over the layout.
    """

    def __init__(self, registers: Iterable[Register]):
        regs = tuple(registers)
        labels = [r.label for r in regs]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate register labels in {labels}")
        self.registers = regs
        self._index = {r.label: i for i, r in enumerate(regs)}

    @classmethod
    def qubits(cls, *labels: str) -> "RegisterLayout":
        """Layout of single-qubit quantum registers."""
        return cls(Register(lab, 2) for lab in labels)

    @classmethod
    def of(cls, *specs) -> "RegisterLayout":
        """Layout from (label, dim) or (label, dim, kind) tuples."""
        return cls(Register(*spec) for spec in specs)

    @property
    def labels(self) -> tuple:
        return tuple(r.label for r in self.registers)

    @property
    def dims(self) -> tuple:
        return tuple(r.dim for r in self.registers)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.registers else 1

    def __len__(self) -> int:
        return len(self.registers)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, RegisterLayout) and self.registers == other.registers

    def __hash__(self):
        return hash(self.registers)

    def __repr__(self):
        inner = ", ".join(f"{r.label}:{r.dim}" for r in self.registers)
        return f"RegisterLayout({inner})"

    def position(self, label: str) -> int:
        if label not in self._index:
            raise KeyError(f"unknown register label {label!r}")
        return self._index[label]

    def positions(self, labels: Iterable[str]) -> tuple:
        return tuple(self.position(lab) for lab in labels)

    def subset(self, labels: Iterable[str]) -> "RegisterLayout":
        """Sub-layout of the given labels, keeping this layout's order."""
        keep = set(labels)
        for lab in keep:
            self.position(lab)
        return RegisterLayout(r for r in self.registers if r.label in keep)

    def complement(self, labels: Iterable[str]) -> tuple:
        drop = set(labels)
        for lab in drop:
            self.position(lab)
        return tuple(lab for lab in self.labels if lab not in drop)

    def concat(self, other: "RegisterLayout") -> "RegisterLayout":
        overlap = set(self.labels) & set(other.labels)
        if overlap:
            raise ValueError(f"register label collision: {sorted(overlap)}")
        return RegisterLayout(self.registers + other.registers)


def _as_layout(layout) -> RegisterLayout:
    if isinstance(layout, RegisterLayout):
        return layout
    return RegisterLayout(layout)


class DensityMatrix:
    """Trace-one PSD operator over a register layout.

    Construction validates Hermiticity, positivity and unit trace to the
    module tolerances unless ``validate=False`` (used internally after
    channel arithmetic that already symmetrizes and renormalizes).
    """

    def __init__(self, layout, matrix, validate: bool = True):
        self.layout = _as_layout(layout)
        mat = np.asarray(matrix, dtype=complex)
        d = self.layout.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match layout dimension {d}")
        if validate:
            if np.abs(mat - mat.conj().T).max() > HERM_ATOL:
                raise ValueError("matrix is not Hermitian to tolerance")
            evals = np.linalg.eigvalsh((mat + mat.conj().T) / 2)
            if evals.min() < -PSD_ATOL:
                raise ValueError(f"matrix has negative eigenvalue {evals.min():.3e}")
            tr = mat.trace().real
            if abs(tr - 1.0) > TRACE_ATOL:
                raise ValueError(f"trace {tr!r} is not 1 to tolerance")
        mat.setflags(write=False)
        self.matrix = mat

    @classmethod
    def from_vector(cls, layout, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(layout, np.outer(v, v.conj()), validate=False)

    @classmethod
    def maximally_mixed(cls, layout) -> "DensityMatrix":
        layout = _as_layout(layout)
        d = layout.dim
        return cls(layout, np.eye(d) / d, validate=False)

    @classmethod
    def computational(cls, layout, bits: Sequence[int]) -> "DensityMatrix":
        """Product basis state |b1 b2 ...> over the layout."""
        layout = _as_layout(layout)
        if len(bits) != len(layout):
            raise ValueError("one basis index per register required")
        idx = 0
        for b, d in zip(bits, layout.dims):
            if not 0 <= b < d:
                raise ValueError(f"basis index {b} out of range for dimension {d}")
            idx = idx * d + b
        v = np.zeros(layout.dim, dtype=complex)
        v[idx] = 1.0
        return cls.from_vector(layout, v)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def reduced(self, keep: Iterable[str]) -> "DensityMatrix":
        """Reduced state on ``keep``, tracing out everything else."""
        return partial_trace(self, self.layout.complement(keep))

    def permuted(self, new_order: Sequence[str]) -> "DensityMatrix":
        """Same state with registers reordered to ``new_order``."""
        if set(new_order) != set(self.layout.labels) or len(new_order) != len(self.layout):
            raise ValueError("new_order must be a permutation of the layout labels")
        perm = self.layout.positions(new_order)
        dims = self.layout.dims
        n = len(dims)
        t = self.matrix.reshape(dims + dims)
        t = t.transpose(tuple(perm) + tuple(p + n for p in perm))
        new_layout = RegisterLayout(self.layout.registers[p] for p in perm)
        return DensityMatrix(new_layout, t.reshape(self.dim, self.dim), validate=False)

    def __repr__(self):
        return f"DensityMatrix({self.layout!r})"


class PureState:
    """Unit vector over a register layout."""

    def __init__(self, layout, vector, validate: bool = True):
        self.layout = _as_layout(layout)
        vec = np.asarray(vector, dtype=complex).ravel()
        if vec.shape != (self.layout.dim,):
            raise ValueError(
                f"vector length {vec.shape[0]} does not match layout dimension {self.layout.dim}"
            )
        if validate and abs(np.linalg.norm(vec) - 1.0) > HERM_ATOL:
            raise ValueError("vector norm is not 1 to tolerance")
        vec.setflags(write=False)
        self.vector = vec

    @classmethod
    def computational(cls, layout, bits: Sequence[int]) -> "PureState":
        layout = _as_layout(layout)
        if len(bits) != len(layout):
            raise ValueError("one basis index per register required")
        idx = 0
        for b, d in zip(bits, layout.dims):
            if not 0 <= b < d:
                raise ValueError(f"basis index {b} out of range for dimension {d}")
            idx = idx * d + b
        v = np.zeros(layout.dim, dtype=complex)
        v[idx] = 1.0
        return cls(layout, v, validate=False)

    def to_density(self) -> DensityMatrix:
        return DensityMatrix.from_vector(self.layout, self.vector)

    def reduced(self, keep: Iterable[str]) -> DensityMatrix:
        return self.to_density().reduced(keep)

    def permuted(self, new_order: Sequence[str]) -> "PureState":
        perm = self.layout.positions(new_order)
        dims = self.layout.dims
        t = self.vector.reshape(dims).transpose(perm)
        new_layout = RegisterLayout(self.layout.registers[p] for p in perm)
        return PureState(new_layout, t.ravel(), validate=False)

    def __repr__(self):
        return f"PureState({self.layout!r})"


class ClassicalQuantumState:
    """Mixture of quantum states tagged by classical branch labels.

    Represents states of the form sum_s q_s rho_s (x) |s><s|_X without a
    dense classical register: the classical side stays structural, which
    keeps dimensions small and makes A:X separability automatic.
    """

    def __init__(self, layout, branches, validate: bool = True):
        self.layout = _as_layout(layout)
        items = []
        for label, weight, dm in branches:
            if not isinstance(dm, DensityMatrix):
                dm = DensityMatrix(self.layout, dm, validate=validate)
            if dm.layout != self.layout:
                raise ValueError("branch layout mismatch")
            items.append((str(label), float(weight), dm))
        if not items:
            raise ValueError("at least one branch required")
        if validate:
            total = sum(w for _, w, _ in items)
            if abs(total - 1.0) > TRACE_ATOL:
                raise ValueError(f"branch weights sum to {total!r}, not 1")
            if any(w < -TRACE_ATOL for _, w, _ in items):
                raise ValueError("negative branch weight")
        self.branches = tuple(items)

    @classmethod
    def from_density(cls, dm: DensityMatrix, label: str = "") -> "ClassicalQuantumState":
        return cls(dm.layout, [(label, 1.0, dm)])

    @property
    def total_weight(self) -> float:
        return sum(w for _, w, _ in self.branches)

    def average_state(self) -> DensityMatrix:
        """Quantum marginal sum_s q_s rho_s (classical register traced out)."""
        acc = np.zeros((self.layout.dim, self.layout.dim), dtype=complex)
        for _, w, dm in self.branches:
            acc += w * dm.matrix
        acc = (acc + acc.conj().T) / 2
        acc /= acc.trace().real
        return DensityMatrix(self.layout, acc, validate=False)

    def with_classical_register(self, label: str = "X") -> DensityMatrix:
        """Diagonal embedding sum_s q_s rho_s (x) |s><s| as a dense state.

        The classical register has one dimension per branch, in branch
        order; intended for entropic evaluations on cuts involving X.
        """
        b = len(self.branches)
        x_reg = Register(label, b, CLASSICAL)
        new_layout = RegisterLayout(self.layout.registers + (x_reg,))
        d = self.layout.dim
        out = np.zeros((d * b, d * b), dtype=complex)
        for i, (_, w, dm) in enumerate(self.branches):
            block = w * dm.matrix
            out[i::b, i::b] = block  # X is the last (fastest) axis
        return DensityMatrix(new_layout, out, validate=False)

    def merged(self, drop_below: float = 1e-14) -> "ClassicalQuantumState":
        """Combine branches with identical labels; drop negligible weights."""
        acc: dict = {}
        for label, w, dm in self.branches:
            if label in acc:
                lab_w, mat = acc[label]
                acc[label] = (lab_w + w, mat + w * dm.matrix)
            else:
                acc[label] = (w, w * dm.matrix)
        items = []
        for label in acc:
            w, mat = acc[label]
            if w <= drop_below:
                continue
            items.append((label, w, DensityMatrix(self.layout, mat / w, validate=False)))
        return ClassicalQuantumState(self.layout, items, validate=False)

    def __repr__(self):
        return f"ClassicalQuantumState({self.layout!r}, branches={len(self.branches)})"


# ---------------------------------------------------------------------------
# Operations


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product in layout order; labels must be disjoint."""
    layout = a.layout.concat(b.layout)
    return DensityMatrix(layout, np.kron(a.matrix, b.matrix), validate=False)


def partial_trace(rho: DensityMatrix, drop: Iterable[str]) -> DensityMatrix:
    """Trace out the ``drop`` registers, preserving the remaining order."""
    drop = list(drop)
    positions = sorted(rho.layout.positions(drop), reverse=True)
    dims = list(rho.layout.dims)
    t = rho.matrix.reshape(tuple(dims) + tuple(dims))
    for pos in positions:
        n = len(dims)
        t = np.trace(t, axis1=pos, axis2=pos + n)
        dims.pop(pos)
    keep = rho.layout.subset(rho.layout.complement(drop))
    d = keep.dim
    return DensityMatrix(keep, t.reshape(d, d), validate=False)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    evals, vecs = np.linalg.eigh(mat)
    # zero out float noise: sqrt would amplify 1e-16 dust to 1e-8
    evals = np.where(evals < 1e-14, 0.0, evals)
    return (vecs * np.sqrt(evals)) @ vecs.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity, squared convention: (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Evaluated as the squared nuclear norm of sqrt(rho) sqrt(sigma), which
    is the same quantity with better conditioning.
    """
    if rho.layout != sigma.layout:
        raise ValueError("fidelity requires identical layouts")
    a = _psd_sqrt(rho.matrix)
    b = _psd_sqrt(sigma.matrix)
    s = np.linalg.svd(a @ b, compute_uv=False)
    f = float(s.sum() ** 2)
    return min(max(f, 0.0), 1.0)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Trace norm ||rho - sigma|| (sum of absolute eigenvalues)."""
    if rho.layout != sigma.layout:
        raise ValueError("trace_distance requires identical layouts")
    diff = rho.matrix - sigma.matrix
    evals = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(np.abs(evals).sum())


def purify(rho: DensityMatrix, reference_label: str = "R") -> PureState:
    """Purification with the reference register first.

    The reference dimension is the smallest power of two covering the
    rank of rho; tracing the reference back out reproduces rho.
    """
    evals, vecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    vecs = vecs[:, order]
    rank = max(1, int(np.count_nonzero(evals > 1e-12)))
    ref_dim = 1 << (rank - 1).bit_length()
    vec = np.zeros((ref_dim, rho.dim), dtype=complex)
    for i in range(rank):
        vec[i] = np.sqrt(evals[i]) * vecs[:, i]
    ref = Register(reference_label, ref_dim)
    layout = RegisterLayout((ref,) + rho.layout.registers)
    v = vec.ravel()
    return PureState(layout, v / np.linalg.norm(v), validate=False)


def max_entangled_state(k: int, label_r: str = "R", label_l: str = "L") -> PureState:
    """Maximally entangled state of k qubit pairs across two 2^k registers."""
    if k < 1:
        raise ValueError("k must be >= 1")
    d = 2 ** k
    layout = RegisterLayout.of((label_r, d), (label_l, d))
    v = np.eye(d, dtype=complex).ravel() / np.sqrt(d)
    return PureState(layout, v, validate=False)
