import random
import time

import numpy as np
import pytest

from helpers import BACKEND_NAMES, canonical_bytes, mixed_log, network_log, random_schema, replay
from mlnstore import errors
from mlnstore.backends import (
    BACKENDS,
    AdjacencyStore,
    DenseMatrixStore,
    EdgeTableStore,
    MatrixStore,
    make_store,
    snapshot_canonical,
)
from mlnstore.backends import matrix as matrix_mod
from mlnstore.generator import ErConfig, generate_er
from mlnstore.model import NodeLayer


def test_empty_canonical_form(make):
    form = snapshot_canonical(make())
    assert (form.schema, form.actors, form.nodes, form.edges) == ((), (), (), ())
    assert form.to_text() == "#DIMENSIONS\n"


def test_insertion_order_does_not_matter(make):
    edges = [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]
    stores = []
    for order in (edges, edges[::-1]):
        s = make({"l": ["x"]})
        actors = sorted({a for e in order for a in e}, reverse=order is not edges)
        for a in actors:
            s.add_node(a, "x")
        for a, b in order:
            s.add_edge(b, "x", a, "x")
        stores.append(canonical_bytes(s))
    assert stores[0] == stores[1]


@pytest.mark.parametrize("seed", range(5))
def test_same_random_network_in_all_backends(seed):
    rng = random.Random(seed)
    schema = random_schema(rng)
    log = network_log(rng, 40, schema)
    results = {}
    for name in BACKEND_NAMES:
        store = BACKENDS[name](schema)
        results[name] = (replay(store, log), canonical_bytes(store))
    first = results[BACKEND_NAMES[0]]
    assert all(r == first for r in results.values())
    assert first[1].count(b"\n") > 40


@pytest.mark.parametrize("seed", range(4))
def test_backend_equivalence_long_mixed_logs(seed):
    log = mixed_log(random.Random(seed), 1200)
    outcomes, snapshots = [], []
    for name in BACKEND_NAMES:
        store = BACKENDS[name]()
        outcomes.append(replay(store, log))
        snapshots.append(canonical_bytes(store))
    dense = DenseMatrixStore()
    outcomes.append(replay(dense, log))
    snapshots.append(canonical_bytes(dense))
    assert all(o == outcomes[0] for o in outcomes)
    assert all(s == snapshots[0] for s in snapshots)
    assert sum(1 for kind, _ in outcomes[0] if kind == "ok") > 600


# -- degree conservation and symmetry


def _er(backend, n=300, seed=1, q=0.01):
    store = make_store(backend)
    generate_er(ErConfig(layers=3, nodes=n, degree=4, interlayer_prob=q, seed=seed), store)
    return store


def test_degree_conservation(backend):
    store = _er(backend)
    total = sum(store.degree(nl.actor, nl.coord) for nl in store.nodes())
    assert total == 2 * store.num_edges


def test_adjacency_sets_symmetric():
    store = _er("adjacency")
    for i, nbrs in store._adj.items():
        assert i not in nbrs
        for j in nbrs:
            assert i in store._adj[j]


def test_matrix_symmetric_and_duplicate_free():
    store = _er("matrix")
    store.consolidate()
    keys = store._keys
    rows, cols = keys >> 32, keys & 0xFFFFFFFF
    pairs = set(zip(rows.tolist(), cols.tolist()))
    assert len(pairs) == len(keys)
    assert all((j, i) in pairs for i, j in pairs)
    assert not np.any(rows == cols)
    assert np.all(np.diff(keys) > 0)


def test_matrix_memory_is_linear():
    store = MatrixStore()
    generate_er(ErConfig(layers=2, nodes=20_000, degree=4, seed=3), store)
    store.consolidate()
    arrays = [v for v in vars(store).values() if isinstance(v, np.ndarray)]
    stored = sum(a.nbytes for a in arrays)
    # 2 entries per edge, 8 bytes each; nothing close to |V_M|^2
    assert stored == 16 * store.num_edges
    assert stored < store.num_nodes ** 2 / 100


def test_supra_adjacency_export():
    store = _er("matrix", n=50)
    mat, order = store.supra_adjacency()
    assert mat.shape == (store.num_nodes, store.num_nodes)
    assert (mat != mat.T).nnz == 0
    assert mat.nnz == 2 * store.num_edges
    pos = {nl: k for k, nl in enumerate(order)}
    for e in store.edges():
        assert mat[pos[e.u], pos[e.v]]


def test_edge_table_rows_and_compaction():
    store = EdgeTableStore({"l": ["x", "y"]})
    for i in range(200):
        store.add_node(f"v{i}", "x")
    for i in range(199):
        store.add_edge(f"v{i}", "x", f"v{i + 1}", "x")
    for i in range(0, 150):
        store.remove_edge(f"v{i}", "x", f"v{i + 1}", "x")
    node_live, edge_live = store.live_row_fraction()
    assert edge_live > 0.5
    assert len(store._e_live) < 199
    assert all(s < t for s, t in zip(store._e_src, store._e_dst))
    for i in range(0, 150):
        store.remove_node(f"v{i}", "x")
    assert store.live_row_fraction()[0] > 0.5
    assert store.num_nodes == 50 and store.num_edges == 49
    assert store.has_edge("v160", "x", "v161", "x")
    # one live row per element
    assert len(store._n_index) == sum(store._n_live)
    assert len(store._e_index) == sum(store._e_live)


# -- consolidation


def _neighbor_map(store):
    return {nl: sorted(store.neighbors(nl.actor, nl.coord)) for nl in store.nodes()}


def test_consolidate_preserves_reads():
    store = MatrixStore({"l": ["x"]})
    for a in "abcd":
        store.add_node(a, "x")
    store.add_edge("a", "x", "b", "x")
    store.add_edge("b", "x", "c", "x")
    store.add_edge("c", "x", "d", "x")
    assert store.pending == 3
    before = _neighbor_map(store)
    store.consolidate()
    assert store.pending == 0
    assert store.num_edges == 3
    assert _neighbor_map(store) == before


def test_consolidate_clean_store_is_noop():
    store = MatrixStore({"l": ["x"]})
    store.add_node("a", "x")
    store.add_node("b", "x")
    store.add_edge("a", "x", "b", "x")
    store.consolidate()
    keys, count = store._keys.copy(), store.consolidations
    store.consolidate()
    assert store.consolidations == count
    assert np.array_equal(store._keys, keys)


@pytest.mark.parametrize("seed", range(10))
def test_interleaved_add_remove_matches_adjacency(seed):
    rng = random.Random(seed)
    actors = [f"v{i}" for i in range(12)]
    ops = []
    for _ in range(300):
        a, b = rng.sample(actors, 2)
        ops.append(("add_edge" if rng.random() < 0.55 else "remove_edge", a, "x", b, "x"))
        if rng.random() < 0.05:
            ops.append(("consolidate",))
    oracle, store = AdjacencyStore({"l": ["x"]}), MatrixStore({"l": ["x"]})
    for s in (oracle, store):
        for a in actors:
            s.add_node(a, "x")
    for op, *args in ops:
        if op == "consolidate":
            store.consolidate()
            continue
        for s in (oracle, store):
            try:
                getattr(s, op)(*args)
            except (errors.DuplicateEdge, errors.UnknownEdge):
                pass
    store.consolidate()
    assert canonical_bytes(store) == canonical_bytes(oracle)


def test_add_then_remove_before_consolidate():
    store = MatrixStore({"l": ["x"]})
    store.add_node("a", "x")
    store.add_node("b", "x")
    store.add_edge("a", "x", "b", "x")
    store.remove_edge("a", "x", "b", "x")
    store.consolidate()
    assert not store.has_edge("a", "x", "b", "x")
    assert store.stored_entries == 0


def test_buffer_threshold_triggers_consolidation(monkeypatch):
    monkeypatch.setattr(matrix_mod, "MIN_BUFFER", 16)
    store = MatrixStore({"l": ["x"]})
    for i in range(100):
        store.add_node(f"v{i}", "x")
    for i in range(99):
        store.add_edge(f"v{i}", "x", f"v{i + 1}", "x")
        assert store.pending <= max(16, 0.1 * store.stored_entries) + 1
    assert store.consolidations >= 1
    assert store.num_edges == 99


def test_matrix_index_compaction(monkeypatch):
    monkeypatch.setattr(matrix_mod, "MIN_BUFFER", 8)
    store = MatrixStore({"l": ["x", "y", "z"]})
    for i in range(60):
        for layer in "xyz":
            store.add_node(f"v{i}", layer)
    for i in range(59):
        store.add_edge(f"v{i}", "x", f"v{i + 1}", "x", {"w": float(i)})
        store.add_edge(f"v{i}", "y", f"v{i}", "x")
        store.add_edge(f"v{i}", "z", f"v{i + 1}", "z")
    store.delete_layer("l", "y")
    store.delete_layer("l", "z")
    store.consolidate()
    assert len(store._node_at) == store.num_nodes == 60
    assert store.num_edges == 59
    assert np.all(np.diff(store._keys) > 0)
    assert store.edge_attrs("v4", "x", "v3", "x") == {"w": 3.0}
    assert sorted(store.neighbors("v0", "x")) == [NodeLayer("v1", ("x",))]


# -- dense layout


def test_dense_cap_raises_memory_error():
    store = DenseMatrixStore({"l": ["x"]}, cap=64)
    for i in range(64):
        store.add_node(f"v{i}", "x")
    with pytest.raises(MemoryError) as info:
        store.add_node("v64", "x")
    assert isinstance(info.value, errors.CapacityExceeded)
    assert store.allocated_bytes == 64 * 64 // 8


def test_dense_requires_opt_in():
    with pytest.raises(errors.UnknownBackend):
        make_store("matrix-dense")
    assert isinstance(make_store("matrix-dense", allow_dense=True), DenseMatrixStore)


# -- complexity smoke


def _insert_time(n: int) -> float:
    rng = random.Random(n)
    pairs = set()
    while len(pairs) < 2 * n:
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    best = float("inf")
    for _ in range(3):
        store = AdjacencyStore({"l": ["x"]})
        for i in range(n):
            store.add_node(f"v{i}", "x")
        start = time.perf_counter()
        for a, b in pairs:
            store.add_edge(f"v{a}", "x", f"v{b}", "x")
        best = min(best, time.perf_counter() - start)
    return best


def test_edge_insertion_does_not_go_quadratic():
    small, large = _insert_time(20_000), _insert_time(40_000)
    assert large / small < 4.0
