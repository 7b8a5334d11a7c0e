"""Supra-adjacency matrix backends.

:class:`MatrixStore` keeps the ``|V_M| x |V_M|`` boolean supra-adjacency
matrix as a sorted array of packed ``(row, col)`` coordinates, storing both
orientations of every edge.  Mutations go to a small buffer that is merged
into the sorted array once it grows past ``max(1024, 10% of entries)``;
reads see the buffer transparently.

:class:`DenseMatrixStore` is the naive bit-matrix layout.  It exists only to
show where a quadratic layout stops fitting in memory, so it refuses to grow
beyond :data:`DENSE_NODE_CAP` node-layers.
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterator

import numpy as np

from mlnstore import errors
from mlnstore.model import Edge, MultilayerStore, NodeLayer

_SHIFT = 32
_MASK = (1 << _SHIFT) - 1
_EMPTY = MappingProxyType({})

MIN_BUFFER = 1024
BUFFER_FRACTION = 0.10
DENSE_NODE_CAP = 20_000


class _IndexedStore(MultilayerStore):
    """Bookkeeping shared by matrix layouts: node-layer <-> supra-index."""

    def _init_storage(self) -> None:
        self._actors: dict[str, None] = {}
        self._index: dict[NodeLayer, int] = {}
        self._node_at: list[NodeLayer | None] = []
        self._nattrs: dict[int, dict] = {}
        # attribute side-map, only for edges that were given attributes
        self._eattrs: dict[tuple[int, int], dict] = {}

    def _rekey(self, fn) -> None:
        self._node_at = [None if nl is None else NodeLayer(nl.actor, fn(nl.coord)) for nl in self._node_at]
        self._index = {nl: i for i, nl in enumerate(self._node_at) if nl is not None}

    def _schema_dimension_added(self, name: str, default_layer: str) -> None:
        if self._index:
            self._rekey(lambda c: c + (default_layer,))

    def _schema_dimension_removed(self, pos: int, layer: str) -> None:
        if self._index:
            self._rekey(lambda c: c[:pos] + c[pos + 1:])

    def _contains_actor(self, actor: str) -> bool:
        return actor in self._actors

    def _insert_actor(self, actor: str) -> None:
        self._actors[actor] = None

    def _iter_actors(self) -> Iterator[str]:
        return iter(self._actors)

    def _actor_count(self) -> int:
        return len(self._actors)

    def _contains_node(self, nl: NodeLayer) -> bool:
        return nl in self._index

    def _iter_nodes(self) -> Iterator[NodeLayer]:
        return iter(self._index)

    def _node_count(self) -> int:
        return len(self._index)

    def _node_attr_map(self, nl: NodeLayer) -> dict:
        return self._nattrs[self._index[nl]]

    @staticmethod
    def _pair(i: int, j: int) -> tuple[int, int]:
        return (i, j) if i < j else (j, i)

    def _edge_attr_map(self, u: NodeLayer, v: NodeLayer) -> dict:
        return self._eattrs.setdefault(self._pair(self._index[u], self._index[v]), {})

    def _make_edge(self, i: int, j: int) -> Edge:
        u, v = self._node_at[i], self._node_at[j]
        if v < u:
            u, v = v, u
        attrs = self._eattrs.get(self._pair(i, j))
        return Edge(u, v, _EMPTY if attrs is None else MappingProxyType(attrs))


class MatrixStore(_IndexedStore):
    name = "matrix"

    def _init_storage(self) -> None:
        super()._init_storage()
        self._keys = np.empty(0, dtype=np.int64)
        # buffered mutations as normalized (i, j) pairs with i < j;
        # invariant: _add is disjoint from stored, _del is a subset of stored
        self._add: set[tuple[int, int]] = set()
        self._del: set[tuple[int, int]] = set()
        self._add_adj: dict[int, set[int]] = {}
        self._del_adj: dict[int, set[int]] = {}
        self._dead = 0
        self.consolidations = 0

    # -- stored-structure reads

    def _stored(self, i: int, j: int) -> bool:
        keys = self._keys
        k = (i << _SHIFT) | j
        pos = int(np.searchsorted(keys, k))
        return pos < len(keys) and int(keys[pos]) == k

    def _stored_row(self, i: int) -> np.ndarray:
        lo, hi = np.searchsorted(self._keys, [i << _SHIFT, (i + 1) << _SHIFT])
        return self._keys[lo:hi] & _MASK

    def _has(self, i: int, j: int) -> bool:
        p = self._pair(i, j)
        if p in self._add:
            return True
        if p in self._del:
            return False
        return self._stored(i, j)

    def _row(self, i: int) -> list[int]:
        cols = self._stored_row(i).tolist()
        gone = self._del_adj.get(i)
        if gone:
            cols = [j for j in cols if j not in gone]
        extra = self._add_adj.get(i)
        if extra:
            cols.extend(extra)
        return cols

    # -- buffer

    @property
    def pending(self) -> int:
        return len(self._add) + len(self._del)

    @property
    def stored_entries(self) -> int:
        return len(self._keys)

    def _buffer(self, i: int, j: int, insert: bool) -> None:
        p = self._pair(i, j)
        if insert:
            if p in self._del:
                self._del.discard(p)
                self._del_adj[i].discard(j)
                self._del_adj[j].discard(i)
            else:
                self._add.add(p)
                self._add_adj.setdefault(i, set()).add(j)
                self._add_adj.setdefault(j, set()).add(i)
        else:
            if p in self._add:
                self._add.discard(p)
                self._add_adj[i].discard(j)
                self._add_adj[j].discard(i)
            else:
                self._del.add(p)
                self._del_adj.setdefault(i, set()).add(j)
                self._del_adj.setdefault(j, set()).add(i)

    def _maybe_consolidate(self) -> None:
        if self.pending > max(MIN_BUFFER, BUFFER_FRACTION * len(self._keys)):
            self.consolidate()

    @staticmethod
    def _both_orientations(pairs: set[tuple[int, int]]) -> np.ndarray:
        arr = np.fromiter((x for p in pairs for x in p), dtype=np.int64, count=2 * len(pairs))
        i, j = arr[0::2], arr[1::2]
        return np.concatenate([(i << _SHIFT) | j, (j << _SHIFT) | i])

    def consolidate(self) -> None:
        """Merge buffered insertions and deletions into the sorted entry array."""
        if not self._add and not self._del and 2 * self._dead <= max(MIN_BUFFER, len(self._node_at)):
            return
        keys = self._keys
        if self._del:
            keys = keys[~np.isin(keys, self._both_orientations(self._del), assume_unique=True)]
        if self._add:
            keys = np.concatenate([keys, self._both_orientations(self._add)])
            keys.sort(kind="stable")
        self._keys = keys
        self._add.clear()
        self._del.clear()
        self._add_adj.clear()
        self._del_adj.clear()
        self.consolidations += 1
        if self._dead > MIN_BUFFER and 2 * self._dead > len(self._node_at):
            self._compact_indices()

    def _compact_indices(self) -> None:
        live = [i for i, nl in enumerate(self._node_at) if nl is not None]
        remap = np.full(len(self._node_at), -1, dtype=np.int64)
        remap[live] = np.arange(len(live), dtype=np.int64)
        # monotone remap keeps the packed keys sorted
        rows, cols = self._keys >> _SHIFT, self._keys & _MASK
        self._keys = (remap[rows] << _SHIFT) | remap[cols]
        self._node_at = [self._node_at[i] for i in live]
        self._index = {nl: i for i, nl in enumerate(self._node_at)}
        self._nattrs = {int(remap[i]): a for i, a in self._nattrs.items()}
        self._eattrs = {(int(remap[i]), int(remap[j])): a for (i, j), a in self._eattrs.items()}
        self._dead = 0

    # -- primitives

    def _insert_node(self, nl: NodeLayer, attrs: dict) -> None:
        i = len(self._node_at)
        self._node_at.append(nl)
        self._index[nl] = i
        self._nattrs[i] = attrs

    def _delete_nodes(self, nls: list[NodeLayer]) -> None:
        for nl in nls:
            i = self._index.pop(nl)
            for j in self._row(i):
                self._buffer(i, j, insert=False)
                self._eattrs.pop(self._pair(i, j), None)
            self._node_at[i] = None
            del self._nattrs[i]
            self._dead += 1
        self._maybe_consolidate()

    def _contains_edge(self, u: NodeLayer, v: NodeLayer) -> bool:
        return self._has(self._index[u], self._index[v])

    def _insert_edge(self, u: NodeLayer, v: NodeLayer, attrs: dict) -> None:
        i, j = self._index[u], self._index[v]
        self._buffer(i, j, insert=True)
        if attrs:
            self._eattrs[self._pair(i, j)] = attrs
        self._maybe_consolidate()

    def _delete_edge(self, u: NodeLayer, v: NodeLayer) -> None:
        i, j = self._index[u], self._index[v]
        self._buffer(i, j, insert=False)
        self._eattrs.pop(self._pair(i, j), None)
        self._maybe_consolidate()

    def _iter_edges(self) -> Iterator[Edge]:
        keys = self._keys
        rows, cols = keys >> _SHIFT, keys & _MASK
        upper = rows < cols
        gone = self._del
        for i, j in zip(rows[upper].tolist(), cols[upper].tolist()):
            if (i, j) not in gone:
                yield self._make_edge(i, j)
        for i, j in list(self._add):
            yield self._make_edge(i, j)

    def _edge_count(self) -> int:
        return len(self._keys) // 2 - len(self._del) + len(self._add)

    def _iter_neighbors(self, nl: NodeLayer) -> Iterator[NodeLayer]:
        node_at = self._node_at
        return (node_at[j] for j in self._row(self._index[nl]))

    def _layer_edges(self, pos: int, layer: str, nodes: list[NodeLayer]) -> list[Edge]:
        member = np.zeros(len(self._node_at), dtype=bool)
        member[[self._index[nl] for nl in nodes]] = True
        rows, cols = self._keys >> _SHIFT, self._keys & _MASK
        sel = (rows < cols) & member[rows] & member[cols]
        gone = self._del
        out = [
            self._make_edge(i, j)
            for i, j in zip(rows[sel].tolist(), cols[sel].tolist())
            if (i, j) not in gone
        ]
        out.extend(self._make_edge(i, j) for i, j in self._add if member[i] and member[j])
        return out

    # -- export

    def supra_adjacency(self):
        """Return ``(csr_array, order)`` for the live node-layers.

        ``order[k]`` is the node-layer of row/column ``k``.
        """
        from scipy import sparse

        self.consolidate()
        live = [i for i, nl in enumerate(self._node_at) if nl is not None]
        remap = np.full(len(self._node_at), -1, dtype=np.int64)
        remap[live] = np.arange(len(live), dtype=np.int64)
        rows = remap[self._keys >> _SHIFT]
        cols = remap[self._keys & _MASK]
        data = np.ones(len(rows), dtype=bool)
        n = len(live)
        mat = sparse.csr_array((data, (rows, cols)), shape=(n, n))
        return mat, [self._node_at[i] for i in live]


class DenseMatrixStore(_IndexedStore):
    """Bit-packed dense supra-adjacency matrix with a hard node-layer cap."""

    name = "matrix-dense"

    def __init__(self, schema=None, cap: int = DENSE_NODE_CAP):
        self.cap = cap
        super().__init__(schema)

    def _init_storage(self) -> None:
        super()._init_storage()
        self._bits = np.zeros((0, 0), dtype=np.uint8)
        self._free: list[int] = []
        self._edges = 0

    @property
    def allocated_bytes(self) -> int:
        return self._bits.nbytes

    def _grow(self, need: int) -> None:
        if need > self.cap:
            raise errors.CapacityExceeded(
                f"dense supra-adjacency would need {need} node-layers, cap is {self.cap} "
                f"({need * need // 8} bytes)"
            )
        size = len(self._bits)
        new = min(self.cap, max(64, 2 * size, need))
        new = (new + 7) // 8 * 8
        bits = np.zeros((new, new // 8), dtype=np.uint8)
        bits[:size, : size // 8] = self._bits
        self._bits = bits

    def _bit(self, i: int, j: int) -> bool:
        return bool(self._bits[i, j >> 3] & (0x80 >> (j & 7)))

    def _set(self, i: int, j: int, on: bool) -> None:
        for a, b in ((i, j), (j, i)):
            if on:
                self._bits[a, b >> 3] |= 0x80 >> (b & 7)
            else:
                self._bits[a, b >> 3] &= ~np.uint8(0x80 >> (b & 7))

    def _row(self, i: int) -> list[int]:
        return np.flatnonzero(np.unpackbits(self._bits[i])).tolist()

    def _insert_node(self, nl: NodeLayer, attrs: dict) -> None:
        if self._free:
            i = self._free.pop()
            self._node_at[i] = nl
        else:
            i = len(self._node_at)
            if i >= len(self._bits):
                self._grow(i + 1)
            self._node_at.append(nl)
        self._index[nl] = i
        self._nattrs[i] = attrs

    def _delete_nodes(self, nls: list[NodeLayer]) -> None:
        for nl in nls:
            i = self._index.pop(nl)
            for j in self._row(i):
                self._set(i, j, False)
                self._eattrs.pop(self._pair(i, j), None)
                self._edges -= 1
            self._node_at[i] = None
            del self._nattrs[i]
            self._free.append(i)

    def _contains_edge(self, u: NodeLayer, v: NodeLayer) -> bool:
        return self._bit(self._index[u], self._index[v])

    def _insert_edge(self, u: NodeLayer, v: NodeLayer, attrs: dict) -> None:
        i, j = self._index[u], self._index[v]
        self._set(i, j, True)
        self._edges += 1
        if attrs:
            self._eattrs[self._pair(i, j)] = attrs

    def _delete_edge(self, u: NodeLayer, v: NodeLayer) -> None:
        i, j = self._index[u], self._index[v]
        self._set(i, j, False)
        self._edges -= 1
        self._eattrs.pop(self._pair(i, j), None)

    def _iter_edges(self) -> Iterator[Edge]:
        for i, nl in enumerate(self._node_at):
            if nl is not None:
                for j in self._row(i):
                    if j > i:
                        yield self._make_edge(i, j)

    def _edge_count(self) -> int:
        return self._edges

    def _iter_neighbors(self, nl: NodeLayer) -> Iterator[NodeLayer]:
        node_at = self._node_at
        return (node_at[j] for j in self._row(self._index[nl]))
