import numpy as np
import pytest

from locbound.circuit import ConnectivityGraph, Embedding, grid_graph, boundary
from locbound.partition import (
    EmbeddedGraphFileError,
    PartitionInternalError,
    check_guarantees,
    grid_partition,
    induced_partition,
    kappa_default,
    parse_embedded_graph_lines,
    read_embedded_graph_file,
)


def test_four_by_four():
    g, e = grid_graph((4, 4))
    p = grid_partition(e, g, 4)
    assert p.count == 4
    assert p.sizes == (4, 4, 4, 4)
    assert sorted(v for b in p.blocks for v in b) == sorted(g.vertices)


def test_lam_at_least_m_single_block():
    g, e = grid_graph((4, 4))
    p = grid_partition(e, g, 16)
    assert p.count == 1
    assert p.boundary_sizes == (0,)


def test_single_vertex():
    g, e = grid_graph((1,))
    p = grid_partition(e, g, 3)
    assert p.blocks == (("0",),)


def test_disjoint_cover_and_size_bound():
    rng = np.random.default_rng(0)
    g, e = grid_graph((7, 5))
    for lam in (1, 2, 3, 5, 8, 20, 35):
        p = grid_partition(e, g, lam)
        flat = [v for b in p.blocks for v in b]
        assert sorted(flat) == sorted(g.vertices)
        assert len(set(flat)) == len(flat)
        assert max(p.sizes) <= lam


def test_boundary_sizes_consistent_with_graph():
    g, e = grid_graph((5, 5))
    p = grid_partition(e, g, 4)
    for block, size in zip(p.blocks, p.boundary_sizes):
        assert size == len(boundary(g, block))


def test_lam_one_singletons():
    g, e = grid_graph((3, 3))
    p = grid_partition(e, g, 1)
    assert all(len(b) == 1 for b in p.blocks)
    deg = {v: len(g.adjacency[v]) for v in g.vertices}
    budget = kappa_default(1.0, 2) * 1.0
    for block, size in zip(p.blocks, p.boundary_sizes):
        v = block[0]
        assert size == (1 + deg[v] if deg[v] else 0)
        assert size <= budget


def test_induced_partition():
    g, e = grid_graph((4, 4))
    p = grid_partition(e, g, 4)
    same = induced_partition(p, g.vertices)
    assert tuple(same) == p.blocks

    dropped = induced_partition(p, p.blocks[1] + p.blocks[2])
    assert len(dropped) == 2

    rng = np.random.default_rng(1)
    for _ in range(10):
        size = int(rng.integers(1, 16))
        subset = [g.vertices[i] for i in rng.choice(16, size=size, replace=False)]
        induced = induced_partition(p, subset)
        assert sum(len(b) for b in induced) == len(set(subset))
        for block in induced:
            owner = next(ob for ob in p.blocks if block[0] in ob)
            assert set(block) <= set(owner)
            assert len(block) <= len(owner)


def test_check_guarantees_dense_grid():
    g, e = grid_graph((32, 32))
    gu = check_guarantees(grid_partition(e, g, 16), e, 16, dense=True, total_vertices=g.m)
    assert gu.ok
    assert gu.size_ok and gu.boundary_ok and gu.count_ok


def test_check_guarantees_sparse():
    rng = np.random.default_rng(2)
    pts = rng.uniform(0, 60, size=(150, 2))
    # enforce unit spacing by rounding onto a coarse lattice and dropping dups
    pts = np.unique(np.round(pts / 1.5) * 1.5, axis=0)
    labels = [str(i) for i in range(len(pts))]
    coords = {lab: pts[i] for i, lab in enumerate(labels)}
    edges = [
        (labels[i], labels[j])
        for i in range(len(pts))
        for j in range(i + 1, len(pts))
        if np.linalg.norm(pts[i] - pts[j]) <= 1.6
    ]
    g = ConnectivityGraph(labels, edges)
    emb = Embedding(coords, 2, c=1.6)
    p = grid_partition(emb, g, 16)
    gu = check_guarantees(p, emb, 16, dense=False, total_vertices=g.m)
    assert gu.size_ok and gu.boundary_ok
    assert gu.count_ok is None
    assert "sparse" in gu.count_note


def test_grid_sweep_small():
    for shape in ((64,), (8, 8), (4, 4, 4)):
        g, e = grid_graph(shape)
        lam = 1
        while lam <= g.m:
            p = grid_partition(e, g, lam)
            gu = check_guarantees(p, e, lam, dense=True, total_vertices=g.m)
            assert gu.ok, (shape, lam, gu)
            lam *= 2


def test_overfull_cell_raises():
    # two points closer than unit spacing sneak past lam = 1 cells
    coords = {"0": np.array([0.1, 0.1]), "1": np.array([0.6, 0.1])}
    g = ConnectivityGraph(["0", "1"], [])
    emb = Embedding(coords, 2, c=1.0)
    with pytest.raises(PartitionInternalError):
        grid_partition(emb, g, 1)


def test_embedded_graph_file(tmp_path):
    text = "\n".join([
        "dim 2",
        "c 1.5",
        "point a 0 0",
        "point b 1 0",
        "point c 0 1",
        "edge a b",
        "edge a c",
    ]) + "\n"
    path = tmp_path / "g.graph"
    path.write_text(text)
    graph, emb = read_embedded_graph_file(path)
    assert graph.m == 3
    assert emb.dimension == 2
    assert emb.c == 1.5

    with pytest.raises(EmbeddedGraphFileError) as err:
        parse_embedded_graph_lines(["dim 2", "point a 0"])
    assert "line 2" in str(err.value)

    with pytest.raises(EmbeddedGraphFileError) as err:
        parse_embedded_graph_lines(["dim 2", "point a 0 0", "edge a zz"])
    assert "line 3" in str(err.value)

    with pytest.raises(EmbeddedGraphFileError):
        parse_embedded_graph_lines(["point a 0 0"])
