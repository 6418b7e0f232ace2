"""Size-bounded partitions of embedded connectivity graphs with explicit,
testable constants.

Construction: axis-aligned cells whose side is chosen so the unit-spacing
packing bound caps the points per cell, followed by a greedy row-major
merge of underfull cells. The merge is what yields the block-count bound,
and it is disabled whenever it would break the per-block boundary bound,
so reported guarantees stay honest. The boundary constant
kappa(c, D) = 4 D (c+1) 2^D is an engineering default validated by the
test suite, not a theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuit import ConnectivityGraph, Embedding


class PartitionInternalError(RuntimeError):
    """A cell exceeded the size cap; impossible for valid embeddings with
    an unclamped cell side, so this indicates bad input."""


def kappa_default(c: float, dimension: int) -> float:
    """Default boundary constant kappa(c, D) = 4 D (c+1) 2^D."""
    return 4.0 * dimension * (c + 1.0) * (2.0 ** dimension)


def boundary_budget(lam: int, c: float, dimension: int, kappa: float | None = None) -> float:
    k = kappa_default(c, dimension) if kappa is None else kappa
    return k * lam ** ((dimension - 1) / dimension)


def _ball_volume(dimension: int) -> float:
    # volume of the radius-1/2 Euclidean ball
    return math.pi ** (dimension / 2) / math.gamma(dimension / 2 + 1) / 2 ** dimension


def cell_side(lam: int, dimension: int) -> int:
    """Cell side from the packing bound: at most lam points fit when the
    side is (lam * v_D)^(1/D) - 1; clamped below at 1."""
    raw = (lam * _ball_volume(dimension)) ** (1.0 / dimension)
    return max(1, int(math.floor(raw)) - 1)


@dataclass
class Partition:
    """Disjoint blocks covering the vertex set, with boundary sizes."""

    blocks: tuple
    boundary_sizes: tuple
    lam: int
    merged: bool
    note: str = ""

    @property
    def count(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    def block_of(self) -> dict:
        out = {}
        for i, block in enumerate(self.blocks):
            for v in block:
                out[v] = i
        return out


@dataclass
class PartitionGuarantee:
    lam: int
    kappa: float
    size_ok: bool
    boundary_ok: bool
    count_ok: bool | None  # None when not applicable
    count_note: str
    worst_size: int
    worst_boundary: int
    worst_size_block: int
    worst_boundary_block: int
    boundary_budget: float
    count: int
    count_budget: int

    @property
    def ok(self) -> bool:
        return self.size_ok and self.boundary_ok and self.count_ok is not False


def _boundary_sizes(graph: ConnectivityGraph, block_id: np.ndarray,
                    n_blocks: int) -> np.ndarray:
    """|dGamma_i| per block: inner vertices with an outside neighbor plus
    outside vertices adjacent to the block (vectorized over edges)."""
    m = len(graph.vertices)
    idx = {v: i for i, v in enumerate(graph.vertices)}
    if not graph.edges:
        return np.zeros(n_blocks, dtype=np.int64)
    eu = np.array([idx[u] for u, _ in graph.edges], dtype=np.int64)
    ev = np.array([idx[v] for _, v in graph.edges], dtype=np.int64)
    bu = block_id[eu]
    bv = block_id[ev]
    cross = bu != bv
    if not cross.any():
        return np.zeros(n_blocks, dtype=np.int64)
    eu, ev, bu, bv = eu[cross], ev[cross], bu[cross], bv[cross]
    # (block, vertex) membership pairs: u and v are inner for their own
    # blocks and outer for each other's.
    pairs = np.concatenate([
        bu * m + eu,  # u inner for block bu
        bv * m + ev,  # v inner for block bv
        bu * m + ev,  # v outer for block bu
        bv * m + eu,  # u outer for block bv
    ])
    uniq = np.unique(pairs)
    return np.bincount(uniq // m, minlength=n_blocks).astype(np.int64)


def grid_partition(embedding: Embedding, graph: ConnectivityGraph, lam: int,
                   kappa: float | None = None) -> Partition:
    """Partition into blocks of at most lam vertices via axis-aligned cells
    plus greedy row-major merging of underfull cells.

    Deterministic given the input order. Merging is rolled back (with a
    note) if any merged block would exceed the kappa boundary budget.
    """
    if lam < 1:
        raise ValueError("lam must be >= 1")
    dim = embedding.dimension
    pts = embedding.coord_array(graph.vertices)
    m = len(graph.vertices)
    side = cell_side(lam, dim)

    shifted = pts - pts.min(axis=0, keepdims=True)
    cells = np.floor(shifted / side).astype(np.int64)
    extents = cells.max(axis=0) + 1
    keys = np.zeros(m, dtype=np.int64)
    for ax in range(dim):
        keys = keys * extents[ax] + cells[:, ax]
    # row-major over cells with the first axis fastest
    rm_keys = np.zeros(m, dtype=np.int64)
    for ax in range(dim - 1, -1, -1):
        rm_keys = rm_keys * extents[ax] + cells[:, ax]

    order = np.lexsort((np.arange(m), rm_keys))
    sorted_keys = rm_keys[order]
    cell_starts = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])
    cell_ends = np.r_[cell_starts[1:], m]
    cell_counts = cell_ends - cell_starts
    if cell_counts.max(initial=0) > lam:
        raise PartitionInternalError(
            f"cell with {cell_counts.max()} > lam = {lam} points; "
            "embedding violates unit spacing or lam is below the packing regime"
        )

    def blocks_from_groups(groups):
        block_id = np.empty(m, dtype=np.int64)
        blocks = []
        for i, members in enumerate(groups):
            block_id[members] = i
            blocks.append(tuple(graph.vertices[j] for j in np.sort(members)))
        return tuple(blocks), block_id

    # raw cells as groups, in row-major order
    raw_groups = [order[s:e] for s, e in zip(cell_starts, cell_ends)]

    merged_groups = []
    acc: list = []
    acc_size = 0
    for grp in raw_groups:
        if acc and acc_size + len(grp) > lam:
            merged_groups.append(np.concatenate(acc))
            acc, acc_size = [], 0
        acc.append(grp)
        acc_size += len(grp)
    if acc:
        merged_groups.append(np.concatenate(acc))

    blocks, block_id = blocks_from_groups(merged_groups)
    bsizes = _boundary_sizes(graph, block_id, len(blocks))
    budget = boundary_budget(lam, embedding.c, dim, kappa)
    if len(merged_groups) < len(raw_groups) and bsizes.max(initial=0) > budget:
        blocks, block_id = blocks_from_groups(raw_groups)
        bsizes = _boundary_sizes(graph, block_id, len(blocks))
        return Partition(
            blocks, tuple(int(b) for b in bsizes), lam, merged=False,
            note="merging disabled: merged blocks would break the boundary bound",
        )
    return Partition(blocks, tuple(int(b) for b in bsizes), lam, merged=True)


def induced_partition(partition: Partition, subset: Iterable[str]) -> tuple:
    """Blocks intersected with the subset; empty intersections dropped."""
    keep = set(str(v) for v in subset)
    out = []
    for block in partition.blocks:
        inter = tuple(v for v in block if v in keep)
        if inter:
            out.append(inter)
    return tuple(out)


def check_guarantees(partition: Partition, embedding: Embedding, lam: int,
                     kappa: float | None = None, dense: bool = False,
                     total_vertices: int | None = None) -> PartitionGuarantee:
    """Check the three partition guarantees against explicit constants.

    The count bound holds for the merged construction on dense instances
    (full grids); pass ``dense=True`` to assert it, otherwise it is
    reported as not applicable.
    """
    dim = embedding.dimension
    k = kappa_default(embedding.c, dim) if kappa is None else kappa
    budget = k * lam ** ((dim - 1) / dim)
    m = total_vertices if total_vertices is not None else sum(partition.sizes)

    sizes = partition.sizes
    bsizes = partition.boundary_sizes
    worst_size = max(sizes, default=0)
    worst_boundary = max(bsizes, default=0)
    worst_size_block = sizes.index(worst_size) if sizes else -1
    worst_boundary_block = bsizes.index(worst_boundary) if bsizes else -1
    count_budget = 2 * math.ceil(m / lam)
    if not dense:
        count_ok: bool | None = None
        count_note = "not applicable (sparse)"
    elif not partition.merged:
        count_ok = None
        count_note = "not applicable (merging disabled)"
    else:
        count_ok = partition.count <= count_budget
        count_note = f"{partition.count} <= {count_budget}"
    return PartitionGuarantee(
        lam=lam,
        kappa=k,
        size_ok=worst_size <= lam,
        boundary_ok=worst_boundary <= budget + 1e-9,
        count_ok=count_ok,
        count_note=count_note,
        worst_size=worst_size,
        worst_boundary=worst_boundary,
        worst_size_block=worst_size_block,
        worst_boundary_block=worst_boundary_block,
        boundary_budget=budget,
        count=partition.count,
        count_budget=count_budget,
    )


# ---------------------------------------------------------------------------
# Embedded-graph file format: dim/c/point/edge lines


class EmbeddedGraphFileError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_embedded_graph_lines(lines: Iterable[str]) -> tuple:
    """Parse ``dim D``, ``c <value>``, ``point label x y [z]`` and
    ``edge u v`` lines into (graph, embedding)."""
    dim = None
    c = 1.0
    coords: dict = {}
    point_order: list = []
    edges: list = []
    for line_no, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        toks = text.split()
        head = toks[0]
        if head == "dim":
            if len(toks) != 2 or not toks[1].isdigit():
                raise EmbeddedGraphFileError(line_no, "expected: dim <D>")
            dim = int(toks[1])
        elif head == "c":
            if len(toks) != 2:
                raise EmbeddedGraphFileError(line_no, "expected: c <value>")
            try:
                c = float(toks[1])
            except ValueError:
                raise EmbeddedGraphFileError(line_no, f"bad c value {toks[1]!r}") from None
        elif head == "point":
            if dim is None:
                raise EmbeddedGraphFileError(line_no, "point before dim line")
            if len(toks) != 2 + dim:
                raise EmbeddedGraphFileError(
                    line_no, f"expected: point <label> and {dim} coordinates"
                )
            label = toks[1]
            if label in coords:
                raise EmbeddedGraphFileError(line_no, f"duplicate point {label!r}")
            try:
                coords[label] = np.array([float(t) for t in toks[2:]], dtype=float)
            except ValueError:
                raise EmbeddedGraphFileError(line_no, "bad coordinate") from None
            point_order.append(label)
        elif head == "edge":
            if len(toks) != 3:
                raise EmbeddedGraphFileError(line_no, "expected: edge <u> <v>")
            if toks[1] not in coords or toks[2] not in coords:
                raise EmbeddedGraphFileError(
                    line_no, f"edge references unknown point ({toks[1]}, {toks[2]})"
                )
            edges.append((toks[1], toks[2]))
        else:
            raise EmbeddedGraphFileError(line_no, f"unknown directive {head!r}")
    if dim is None:
        raise EmbeddedGraphFileError(0, "missing dim line")
    if not point_order:
        raise EmbeddedGraphFileError(0, "no points")
    graph = ConnectivityGraph(point_order, edges)
    return graph, Embedding(coords=coords, dimension=dim, c=c)


def read_embedded_graph_file(path) -> tuple:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_embedded_graph_lines(fh)
