"""Dictionary-of-sets adjacency backend.

Vertices of the underlying graph are node-layers, so this is also the
"graph model" view of a multilayer network: a plain graph on ``V_M``.
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterator

from mlnstore.model import Edge, MultilayerStore, NodeLayer


class AdjacencyStore(MultilayerStore):
    name = "adjacency"

    def _init_storage(self) -> None:
        self._actor_ids: dict[str, int] = {}
        # (actor id, coord) -> node index
        self._index: dict[tuple[int, tuple[str, ...]], int] = {}
        self._node_of: dict[int, NodeLayer] = {}
        self._adj: dict[int, set[int]] = {}
        self._nattrs: dict[int, dict] = {}
        # (min index, max index) -> attrs
        self._eattrs: dict[tuple[int, int], dict] = {}
        self._next = 0

    def _idx(self, nl: NodeLayer) -> int:
        return self._index[(self._actor_ids[nl.actor], nl.coord)]

    @staticmethod
    def _key(i: int, j: int) -> tuple[int, int]:
        return (i, j) if i < j else (j, i)

    # -- schema

    def _rekey(self, fn) -> None:
        node_of = {i: NodeLayer(nl.actor, fn(nl.coord)) for i, nl in self._node_of.items()}
        self._node_of = node_of
        self._index = {(self._actor_ids[nl.actor], nl.coord): i for i, nl in node_of.items()}

    def _schema_dimension_added(self, name: str, default_layer: str) -> None:
        if self._node_of:
            self._rekey(lambda c: c + (default_layer,))

    def _schema_dimension_removed(self, pos: int, layer: str) -> None:
        if self._node_of:
            self._rekey(lambda c: c[:pos] + c[pos + 1:])

    # -- actors

    def _contains_actor(self, actor: str) -> bool:
        return actor in self._actor_ids

    def _insert_actor(self, actor: str) -> None:
        self._actor_ids[actor] = len(self._actor_ids)

    def _iter_actors(self) -> Iterator[str]:
        return iter(self._actor_ids)

    def _actor_count(self) -> int:
        return len(self._actor_ids)

    # -- nodes

    def _contains_node(self, nl: NodeLayer) -> bool:
        aid = self._actor_ids.get(nl.actor)
        return aid is not None and (aid, nl.coord) in self._index

    def _insert_node(self, nl: NodeLayer, attrs: dict) -> None:
        i = self._next
        self._next += 1
        self._index[(self._actor_ids[nl.actor], nl.coord)] = i
        self._node_of[i] = nl
        self._adj[i] = set()
        self._nattrs[i] = attrs

    def _delete_nodes(self, nls: list[NodeLayer]) -> None:
        for nl in nls:
            i = self._index.pop((self._actor_ids[nl.actor], nl.coord))
            for j in self._adj.pop(i):
                self._adj[j].discard(i)
                del self._eattrs[self._key(i, j)]
            del self._node_of[i]
            del self._nattrs[i]

    def _iter_nodes(self) -> Iterator[NodeLayer]:
        return iter(self._node_of.values())

    def _node_count(self) -> int:
        return len(self._node_of)

    def _node_attr_map(self, nl: NodeLayer) -> dict:
        return self._nattrs[self._idx(nl)]

    # -- edges

    def _contains_edge(self, u: NodeLayer, v: NodeLayer) -> bool:
        return self._idx(v) in self._adj[self._idx(u)]

    def _insert_edge(self, u: NodeLayer, v: NodeLayer, attrs: dict) -> None:
        i, j = self._idx(u), self._idx(v)
        self._adj[i].add(j)
        self._adj[j].add(i)
        self._eattrs[self._key(i, j)] = attrs

    def _delete_edge(self, u: NodeLayer, v: NodeLayer) -> None:
        i, j = self._idx(u), self._idx(v)
        self._adj[i].discard(j)
        self._adj[j].discard(i)
        del self._eattrs[self._key(i, j)]

    def _iter_edges(self) -> Iterator[Edge]:
        node_of = self._node_of
        for (i, j), attrs in self._eattrs.items():
            u, v = node_of[i], node_of[j]
            if v < u:
                u, v = v, u
            yield Edge(u, v, MappingProxyType(attrs))

    def _edge_count(self) -> int:
        return len(self._eattrs)

    def _edge_attr_map(self, u: NodeLayer, v: NodeLayer) -> dict:
        return self._eattrs[self._key(self._idx(u), self._idx(v))]

    def _iter_neighbors(self, nl: NodeLayer) -> Iterator[NodeLayer]:
        node_of = self._node_of
        return (node_of[j] for j in list(self._adj[self._idx(nl)]))

    def _layer_edges(self, pos: int, layer: str, nodes: list[NodeLayer]) -> list[Edge]:
        node_of, adj, eattrs, key = self._node_of, self._adj, self._eattrs, self._key
        members = {self._idx(nl) for nl in nodes}
        out = []
        for i in members:
            for j in adj[i]:
                if i < j and j in members:
                    u, v = node_of[i], node_of[j]
                    if v < u:
                        u, v = v, u
                    out.append(Edge(u, v, MappingProxyType(eattrs[key(i, j)])))
        return out
