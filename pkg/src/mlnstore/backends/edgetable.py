"""Relational-style backend: one table per element of the quadruple.

Tables are column lists with a ``live`` tombstone column.  Only two hash
indexes exist, on ``(actor, coord)`` for node-layers and on the normalized
``(src, dst)`` row pair for edges; everything else (neighbors, layer scans,
cascades) is a sequential scan, as it would be in an unindexed relation.
"""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterator

from mlnstore.model import Edge, MultilayerStore, NodeLayer

COMPACT_MIN_ROWS = 32


class EdgeTableStore(MultilayerStore):
    name = "edgetable"

    def _init_storage(self) -> None:
        # Actors(id, name)
        self._a_name: list[str] = []
        self._a_index: dict[str, int] = {}
        # Layers(dim-id, layer-id, name); dimensions get stable ids so that
        # deleting one does not renumber the others
        self._dim_ids: list[int] = []
        self._next_dim = 0
        self._l_dim: list[int] = []
        self._l_name: list[str] = []
        self._l_live: list[bool] = []
        self._l_index: dict[tuple[int, str], int] = {}
        # NodeLayers(row, actor-id, coord layer-ids, attrs)
        self._n_actor: list[int] = []
        self._n_coord: list[tuple[int, ...]] = []
        self._n_attrs: list[dict | None] = []
        self._n_live: list[bool] = []
        self._n_index: dict[tuple[int, tuple[int, ...]], int] = {}
        self._n_dead = 0
        # Edges(row, src-row, dst-row, attrs) with src < dst
        self._e_src: list[int] = []
        self._e_dst: list[int] = []
        self._e_attrs: list[dict | None] = []
        self._e_live: list[bool] = []
        self._e_index: dict[tuple[int, int], int] = {}
        self._e_dead = 0

    # -- encoding

    def _encode(self, coord: tuple[str, ...]) -> tuple[int, ...]:
        return tuple(self._l_index[(dim, name)] for dim, name in zip(self._dim_ids, coord))

    def _decode(self, row: int) -> NodeLayer:
        names = self._l_name
        return NodeLayer(self._a_name[self._n_actor[row]], tuple(names[l] for l in self._n_coord[row]))

    def _row(self, nl: NodeLayer) -> int | None:
        aid = self._a_index.get(nl.actor)
        if aid is None:
            return None
        return self._n_index.get((aid, self._encode(nl.coord)))

    @staticmethod
    def _pair(i: int, j: int) -> tuple[int, int]:
        return (i, j) if i < j else (j, i)

    # -- schema

    def _new_layer_row(self, dim_id: int, name: str) -> None:
        self._l_index[(dim_id, name)] = len(self._l_name)
        self._l_dim.append(dim_id)
        self._l_name.append(name)
        self._l_live.append(True)

    def _schema_dimension_added(self, name: str, default_layer: str) -> None:
        dim_id = self._next_dim
        self._next_dim += 1
        self._dim_ids.append(dim_id)
        self._new_layer_row(dim_id, default_layer)
        lid = self._l_index[(dim_id, default_layer)]
        self._n_coord = [c + (lid,) for c in self._n_coord]
        self._reindex_nodes()

    def _schema_dimension_removed(self, pos: int, layer: str) -> None:
        dim_id = self._dim_ids.pop(pos)
        self._l_live[self._l_index.pop((dim_id, layer))] = False
        self._n_coord = [c[:pos] + c[pos + 1:] for c in self._n_coord]
        self._reindex_nodes()

    def _schema_layer_added(self, pos: int, layer: str) -> None:
        self._new_layer_row(self._dim_ids[pos], layer)

    def _schema_layer_removed(self, pos: int, layer: str) -> None:
        self._l_live[self._l_index.pop((self._dim_ids[pos], layer))] = False

    def _reindex_nodes(self) -> None:
        self._n_index = {
            (self._n_actor[r], self._n_coord[r]): r
            for r in range(len(self._n_live))
            if self._n_live[r]
        }

    # -- actors

    def _contains_actor(self, actor: str) -> bool:
        return actor in self._a_index

    def _insert_actor(self, actor: str) -> None:
        self._a_index[actor] = len(self._a_name)
        self._a_name.append(actor)

    def _iter_actors(self) -> Iterator[str]:
        return iter(self._a_name)

    def _actor_count(self) -> int:
        return len(self._a_name)

    # -- nodes

    def _contains_node(self, nl: NodeLayer) -> bool:
        return self._row(nl) is not None

    def _insert_node(self, nl: NodeLayer, attrs: dict) -> None:
        aid = self._a_index[nl.actor]
        coord = self._encode(nl.coord)
        self._n_index[(aid, coord)] = len(self._n_live)
        self._n_actor.append(aid)
        self._n_coord.append(coord)
        self._n_attrs.append(attrs)
        self._n_live.append(True)

    def _delete_nodes(self, nls: list[NodeLayer]) -> None:
        rows = {self._row(nl) for nl in nls}
        src, dst, live = self._e_src, self._e_dst, self._e_live
        for e in range(len(live)):
            if live[e] and (src[e] in rows or dst[e] in rows):
                self._kill_edge(e)
        for r in rows:
            del self._n_index[(self._n_actor[r], self._n_coord[r])]
            self._n_live[r] = False
            self._n_attrs[r] = None
        self._n_dead += len(rows)
        self._maybe_compact()

    def _iter_nodes(self) -> Iterator[NodeLayer]:
        live = self._n_live
        return (self._decode(r) for r in range(len(live)) if live[r])

    def _node_count(self) -> int:
        return len(self._n_index)

    def _node_attr_map(self, nl: NodeLayer) -> dict:
        return self._n_attrs[self._row(nl)]

    # -- edges

    def _contains_edge(self, u: NodeLayer, v: NodeLayer) -> bool:
        return self._pair(self._row(u), self._row(v)) in self._e_index

    def _insert_edge(self, u: NodeLayer, v: NodeLayer, attrs: dict) -> None:
        i, j = self._pair(self._row(u), self._row(v))
        self._e_index[(i, j)] = len(self._e_live)
        self._e_src.append(i)
        self._e_dst.append(j)
        self._e_attrs.append(attrs)
        self._e_live.append(True)

    def _kill_edge(self, e: int) -> None:
        del self._e_index[(self._e_src[e], self._e_dst[e])]
        self._e_live[e] = False
        self._e_attrs[e] = None
        self._e_dead += 1

    def _delete_edge(self, u: NodeLayer, v: NodeLayer) -> None:
        self._kill_edge(self._e_index[self._pair(self._row(u), self._row(v))])
        self._maybe_compact()

    def _edge_row(self, e: int) -> Edge:
        u, v = self._decode(self._e_src[e]), self._decode(self._e_dst[e])
        if v < u:
            u, v = v, u
        return Edge(u, v, MappingProxyType(self._e_attrs[e]))

    def _iter_edges(self) -> Iterator[Edge]:
        live = self._e_live
        return (self._edge_row(e) for e in range(len(live)) if live[e])

    def _edge_count(self) -> int:
        return len(self._e_index)

    def _edge_attr_map(self, u: NodeLayer, v: NodeLayer) -> dict:
        return self._e_attrs[self._e_index[self._pair(self._row(u), self._row(v))]]

    def _iter_neighbors(self, nl: NodeLayer) -> Iterator[NodeLayer]:
        r = self._row(nl)
        src, dst, live = self._e_src, self._e_dst, self._e_live
        found = []
        for e in range(len(live)):
            if live[e]:
                if src[e] == r:
                    found.append(dst[e])
                elif dst[e] == r:
                    found.append(src[e])
        return (self._decode(x) for x in found)

    # -- layer scans

    def _layer_rows(self, pos: int, layer: str) -> list[int]:
        lid = self._l_index[(self._dim_ids[pos], layer)]
        coord, live = self._n_coord, self._n_live
        return [r for r in range(len(live)) if live[r] and coord[r][pos] == lid]

    def _layer_nodes(self, pos: int, layer: str) -> list[NodeLayer]:
        return [self._decode(r) for r in self._layer_rows(pos, layer)]

    def _layer_edges(self, pos: int, layer: str, nodes: list[NodeLayer]) -> list[Edge]:
        members = set(self._layer_rows(pos, layer))
        src, dst, live = self._e_src, self._e_dst, self._e_live
        return [
            self._edge_row(e)
            for e in range(len(live))
            if live[e] and src[e] in members and dst[e] in members
        ]

    # -- maintenance

    def _maybe_compact(self) -> None:
        if self._e_dead >= COMPACT_MIN_ROWS and 2 * self._e_dead >= len(self._e_live):
            self._compact_edges()
        if self._n_dead >= COMPACT_MIN_ROWS and 2 * self._n_dead >= len(self._n_live):
            self._compact_nodes()

    def _compact_edges(self) -> None:
        keep = [e for e in range(len(self._e_live)) if self._e_live[e]]
        self._e_src = [self._e_src[e] for e in keep]
        self._e_dst = [self._e_dst[e] for e in keep]
        self._e_attrs = [self._e_attrs[e] for e in keep]
        self._e_live = [True] * len(keep)
        self._e_index = {(s, t): e for e, (s, t) in enumerate(zip(self._e_src, self._e_dst))}
        self._e_dead = 0

    def _compact_nodes(self) -> None:
        keep = [r for r in range(len(self._n_live)) if self._n_live[r]]
        remap = {old: new for new, old in enumerate(keep)}
        self._n_actor = [self._n_actor[r] for r in keep]
        self._n_coord = [self._n_coord[r] for r in keep]
        self._n_attrs = [self._n_attrs[r] for r in keep]
        self._n_live = [True] * len(keep)
        self._n_dead = 0
        self._reindex_nodes()
        # edge endpoints are always live rows here; remapping keeps src < dst
        self._compact_edges()
        self._e_src = [remap[s] for s in self._e_src]
        self._e_dst = [remap[t] for t in self._e_dst]
        self._e_index = {(s, t): e for e, (s, t) in enumerate(zip(self._e_src, self._e_dst))}

    def live_row_fraction(self) -> tuple[float, float]:
        """Fraction of live rows in the NodeLayers and Edges tables."""
        n = len(self._n_live) or 1
        e = len(self._e_live) or 1
        return (len(self._n_index) / n, len(self._e_index) / e)
