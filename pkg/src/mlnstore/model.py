"""Multilayer network data model and the storage contract shared by all backends.

A network is the quadruple ``(V_M, E_M, V, L)``: node-layers, undirected edges
between node-layers, actors, and an ordered list of dimensions each holding a
set of elementary layers.  :class:`MultilayerStore` owns the schema and every
precondition check; concrete backends only supply the storage primitives, so
all three layouts raise the same errors in the same order.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from mlnstore import errors

AttributeValue = Union[float, str]
CoordLike = Union[str, Sequence[str]]


class NodeLayer(NamedTuple):
    """An actor placed at one layer coordinate (one name per dimension)."""

    actor: str
    coord: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.actor}@{'/'.join(self.coord)}"


class Edge(NamedTuple):
    """Undirected edge; ``u <= v`` always holds for edges handed out by a store."""

    u: NodeLayer
    v: NodeLayer
    attrs: Mapping[str, AttributeValue] = MappingProxyType({})

    @property
    def is_intralayer(self) -> bool:
        return self.u.coord == self.v.coord


class LayerRef(NamedTuple):
    dimension: str
    layer: str


class LayerContents(NamedTuple):
    node_count: int
    edge_count: int
    nodes: list[NodeLayer]
    edges: list[Edge]


@dataclass(frozen=True)
class DimensionSchema:
    """Immutable snapshot of the layer structure.

    ``dimensions`` keeps dimension order (it fixes coordinate positions); the
    layers of each dimension are kept in insertion order.
    """

    dimensions: tuple[tuple[str, tuple[str, ...]], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[str]]) -> "DimensionSchema":
        return cls(tuple((name, tuple(layers)) for name, layers in mapping.items()))

    @property
    def d(self) -> int:
        return len(self.dimensions)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.dimensions)

    def index(self, dimension: str) -> int:
        for i, (name, _) in enumerate(self.dimensions):
            if name == dimension:
                return i
        raise errors.UnknownDimension(dimension)

    def layers(self, dimension: str) -> tuple[str, ...]:
        return self.dimensions[self.index(dimension)][1]


def normalize_value(value: object) -> AttributeValue:
    if isinstance(value, bool):
        raise errors.InvalidAttributeValue(f"booleans are not attribute values: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return value
    raise errors.InvalidAttributeValue(f"unsupported attribute value {value!r}")


def normalize_attrs(attrs: Mapping[str, object] | None) -> dict[str, AttributeValue]:
    if not attrs:
        return {}
    out = {}
    for key, value in attrs.items():
        if not isinstance(key, str) or not key:
            raise errors.EmptyKey("attribute keys must be non-empty strings")
        out[key] = normalize_value(value)
    return out


def _check_name(name: object, what: str) -> str:
    if not isinstance(name, str) or not name:
        raise errors.InvalidName(f"{what} must be a non-empty string, got {name!r}")
    return name


def ordered(u: NodeLayer, v: NodeLayer) -> tuple[NodeLayer, NodeLayer]:
    return (u, v) if u <= v else (v, u)


class MultilayerStore(abc.ABC):
    """Storage contract for a multilayer network.

    Public methods validate arguments and raise :mod:`mlnstore.errors`
    exceptions; the underscore primitives below them receive only
    well-formed, already-checked node-layers.

    Stores follow a single-writer rule: mutations must not overlap with each
    other or with reads, but any number of readers may run between mutations.
    """

    name = "abstract"

    def __init__(self, schema: DimensionSchema | Mapping[str, Iterable[str]] | None = None):
        # dimension name -> ordered layer set (dict used as ordered set)
        self._dims: list[str] = []
        self._layers: dict[str, dict[str, None]] = {}
        # the same dicts as _layers, in coordinate order
        self._layer_sets: list[dict[str, None]] = []
        self._init_storage()
        if schema is None:
            return
        if not isinstance(schema, DimensionSchema):
            schema = DimensionSchema.from_mapping(schema)
        for dim, layers in schema.dimensions:
            if not layers:
                raise errors.InvalidName(f"dimension {dim!r} needs at least one layer")
            self.create_dimension(dim, layers[0])
            for layer in layers[1:]:
                self.create_layer(dim, layer)

    # ------------------------------------------------------------------ schema

    @property
    def schema(self) -> DimensionSchema:
        return DimensionSchema(tuple((d, tuple(self._layers[d])) for d in self._dims))

    @property
    def d(self) -> int:
        return len(self._dims)

    def dimension_index(self, dimension: str) -> int:
        try:
            return self._dims.index(dimension)
        except ValueError:
            raise errors.UnknownDimension(f"unknown dimension {dimension!r}") from None

    def layers(self, dimension: str) -> tuple[str, ...]:
        self.dimension_index(dimension)
        return tuple(self._layers[dimension])

    def has_layer(self, dimension: str, layer: str) -> bool:
        return layer in self._layers.get(dimension, ())

    def _layer_position(self, dimension: str, layer: str) -> int:
        pos = self.dimension_index(dimension)
        if layer not in self._layers[dimension]:
            raise errors.UnknownLayer(f"unknown layer {layer!r} in dimension {dimension!r}")
        return pos

    def create_dimension(self, name: str, default_layer: str) -> str:
        """Add a dimension; existing node-layers take ``default_layer`` in it."""
        _check_name(name, "dimension name")
        if name in self._layers:
            raise errors.DuplicateDimension(f"dimension {name!r} already exists")
        _check_name(default_layer, "layer name")
        self._dims.append(name)
        self._layers[name] = {default_layer: None}
        self._layer_sets.append(self._layers[name])
        self._schema_dimension_added(name, default_layer)
        return name

    def delete_dimension(self, name: str) -> None:
        pos = self.dimension_index(name)
        if len(self._layers[name]) != 1:
            raise errors.DimensionNotSingleton(
                f"dimension {name!r} has {len(self._layers[name])} layers; only singleton "
                "dimensions can be deleted"
            )
        if len(self._dims) == 1:
            raise errors.LastDimension("a network keeps at least one dimension")
        (layer,) = self._layers[name]
        self._schema_dimension_removed(pos, layer)
        del self._dims[pos]
        del self._layers[name]
        del self._layer_sets[pos]

    def create_layer(self, dimension: str, layer: str) -> LayerRef:
        self.dimension_index(dimension)
        _check_name(layer, "layer name")
        if layer in self._layers[dimension]:
            raise errors.DuplicateLayer(f"layer {layer!r} already exists in {dimension!r}")
        self._layers[dimension][layer] = None
        self._schema_layer_added(self._dims.index(dimension), layer)
        return LayerRef(dimension, layer)

    def delete_layer(self, dimension: str, layer: str) -> None:
        """Drop a layer together with its node-layers and their incident edges."""
        pos = self._layer_position(dimension, layer)
        if len(self._layers[dimension]) == 1:
            raise errors.LastLayerInDimension(
                f"{layer!r} is the last layer of dimension {dimension!r}"
            )
        doomed = self._layer_nodes(pos, layer)
        if doomed:
            self._delete_nodes(doomed)
        del self._layers[dimension][layer]
        self._schema_layer_removed(pos, layer)

    # ------------------------------------------------------------- coordinates

    def coordinate(self, coord: CoordLike) -> tuple[str, ...]:
        """Validate ``coord`` against the schema and return it as a tuple.

        A bare string is accepted as shorthand when the network has one dimension.
        """
        if type(coord) is not tuple:
            coord = (coord,) if isinstance(coord, str) else tuple(coord)
        sets = self._layer_sets
        if not sets or len(coord) != len(sets):
            raise errors.InvalidCoordinate(
                f"coordinate {coord!r} has arity {len(coord)}, expected {len(sets)}"
            )
        for layer, allowed in zip(coord, sets):
            if layer not in allowed:
                raise errors.InvalidCoordinate(f"{layer!r} is not a layer of its dimension")
        return coord

    def _lookup(self, actor: str, coord: CoordLike, exc: type[errors.MLNError]) -> NodeLayer:
        try:
            nl = NodeLayer(actor, self.coordinate(coord))
        except errors.InvalidCoordinate as e:
            raise exc(f"no node-layer {actor!r} at {coord!r} ({e})") from None
        if not self._contains_node(nl):
            raise exc(f"no node-layer {nl}")
        return nl

    # ------------------------------------------------------------------- nodes

    def add_node(
        self, actor: str, coord: CoordLike, attrs: Mapping[str, object] | None = None
    ) -> NodeLayer:
        _check_name(actor, "actor name")
        nl = NodeLayer(actor, self.coordinate(coord))
        if self._contains_node(nl):
            raise errors.DuplicateNode(f"node-layer {nl} already exists")
        clean = normalize_attrs(attrs)
        if not self._contains_actor(actor):
            self._insert_actor(actor)
        self._insert_node(nl, clean)
        return nl

    def add_actor(self, actor: str) -> str:
        """Insert an actor into V without placing it in any layer (idempotent)."""
        _check_name(actor, "actor name")
        if not self._contains_actor(actor):
            self._insert_actor(actor)
        return actor

    def remove_node(self, actor: str, coord: CoordLike) -> None:
        """Remove a node-layer and its incident edges; the actor stays in V."""
        nl = self._lookup(actor, coord, errors.UnknownNode)
        self._delete_nodes([nl])

    def update_node(self, actor: str, coord: CoordLike, key: str, value: AttributeValue) -> None:
        nl = self._lookup(actor, coord, errors.UnknownNode)
        if not isinstance(key, str) or not key:
            raise errors.EmptyKey("attribute keys must be non-empty strings")
        self._node_attr_map(nl)[key] = normalize_value(value)

    def node_attrs(self, actor: str, coord: CoordLike) -> dict[str, AttributeValue]:
        return dict(self._node_attr_map(self._lookup(actor, coord, errors.UnknownNode)))

    def has_node(self, actor: str, coord: CoordLike) -> bool:
        try:
            return self._contains_node(NodeLayer(actor, self.coordinate(coord)))
        except errors.InvalidCoordinate:
            return False

    def has_actor(self, actor: str) -> bool:
        return self._contains_actor(actor)

    def neighbors(self, actor: str, coord: CoordLike) -> Iterator[NodeLayer]:
        """Node-layers sharing an edge with the given one, each exactly once."""
        nl = self._lookup(actor, coord, errors.UnknownNode)
        return self._iter_neighbors(nl)

    def degree(self, actor: str, coord: CoordLike) -> int:
        return sum(1 for _ in self.neighbors(actor, coord))

    # ------------------------------------------------------------------- edges

    def _endpoints(self, a, ca, b, cb, exc) -> tuple[NodeLayer, NodeLayer]:
        u = self._lookup(a, ca, exc)
        v = self._lookup(b, cb, exc)
        return ordered(u, v)

    def add_edge(
        self,
        a: str,
        coord_a: CoordLike,
        b: str,
        coord_b: CoordLike,
        attrs: Mapping[str, object] | None = None,
    ) -> Edge:
        u, v = self._endpoints(a, coord_a, b, coord_b, errors.UnknownEndpoint)
        if u == v:
            raise errors.SelfLoop(f"self-loop on {u}")
        if self._contains_edge(u, v):
            raise errors.DuplicateEdge(f"edge {u} -- {v} already exists")
        clean = normalize_attrs(attrs)
        self._insert_edge(u, v, clean)
        return Edge(u, v, MappingProxyType(clean))

    def _existing_edge(self, a, ca, b, cb) -> tuple[NodeLayer, NodeLayer]:
        u, v = self._endpoints(a, ca, b, cb, errors.UnknownEdge)
        if u == v or not self._contains_edge(u, v):
            raise errors.UnknownEdge(f"no edge {u} -- {v}")
        return u, v

    def remove_edge(self, a: str, coord_a: CoordLike, b: str, coord_b: CoordLike) -> None:
        u, v = self._existing_edge(a, coord_a, b, coord_b)
        self._delete_edge(u, v)

    def update_edge(
        self, a: str, coord_a: CoordLike, b: str, coord_b: CoordLike, key: str, value: AttributeValue
    ) -> None:
        u, v = self._existing_edge(a, coord_a, b, coord_b)
        if not isinstance(key, str) or not key:
            raise errors.EmptyKey("attribute keys must be non-empty strings")
        self._edge_attr_map(u, v)[key] = normalize_value(value)

    def edge_attrs(self, a: str, coord_a: CoordLike, b: str, coord_b: CoordLike) -> dict:
        return dict(self._edge_attr_map(*self._existing_edge(a, coord_a, b, coord_b)))

    def has_edge(self, a: str, coord_a: CoordLike, b: str, coord_b: CoordLike) -> bool:
        try:
            u = NodeLayer(a, self.coordinate(coord_a))
            v = NodeLayer(b, self.coordinate(coord_b))
        except errors.InvalidCoordinate:
            return False
        if u == v or not (self._contains_node(u) and self._contains_node(v)):
            return False
        return self._contains_edge(*ordered(u, v))

    # ------------------------------------------------------------- bulk reads

    def actors(self) -> Iterator[str]:
        return self._iter_actors()

    def nodes(self) -> Iterator[NodeLayer]:
        return self._iter_nodes()

    def edges(self) -> Iterator[Edge]:
        return self._iter_edges()

    @property
    def num_actors(self) -> int:
        return self._actor_count()

    @property
    def num_nodes(self) -> int:
        return self._node_count()

    @property
    def num_edges(self) -> int:
        return self._edge_count()

    def is_blank(self) -> bool:
        """True for a store with no dimensions and no actors."""
        return not self._dims and self._actor_count() == 0

    def layer_contents(self, dimension: str, layer: str) -> LayerContents:
        """Node-layers using ``layer`` in ``dimension`` and the edges among them."""
        pos = self._layer_position(dimension, layer)
        nodes = self._layer_nodes(pos, layer)
        edges = self._layer_edges(pos, layer, nodes)
        return LayerContents(len(nodes), len(edges), nodes, edges)

    def canonical(self):
        from mlnstore.backends.canonical import snapshot_canonical

        return snapshot_canonical(self)

    def __repr__(self) -> str:
        return (
            f"<{type(self).__name__} d={self.d} |V|={self.num_actors} "
            f"|V_M|={self.num_nodes} |E_M|={self.num_edges}>"
        )

    # -------------------------------------------------- overridable defaults

    def _layer_nodes(self, pos: int, layer: str) -> list[NodeLayer]:
        return [nl for nl in self._iter_nodes() if nl.coord[pos] == layer]

    def _layer_edges(self, pos: int, layer: str, nodes: list[NodeLayer]) -> list[Edge]:
        out = []
        for u in nodes:
            for v in self._iter_neighbors(u):
                if v.coord[pos] == layer and u < v:
                    out.append(Edge(u, v, MappingProxyType(self._edge_attr_map(u, v))))
        return out

    def _schema_layer_added(self, pos: int, layer: str) -> None:
        pass

    def _schema_layer_removed(self, pos: int, layer: str) -> None:
        pass

    # ------------------------------------------------------ backend primitives

    @abc.abstractmethod
    def _init_storage(self) -> None: ...

    @abc.abstractmethod
    def _schema_dimension_added(self, name: str, default_layer: str) -> None:
        """Extend every node-layer coordinate with ``default_layer``."""

    @abc.abstractmethod
    def _schema_dimension_removed(self, pos: int, layer: str) -> None:
        """Drop coordinate position ``pos`` (whose only value is ``layer``)."""

    @abc.abstractmethod
    def _contains_actor(self, actor: str) -> bool: ...

    @abc.abstractmethod
    def _insert_actor(self, actor: str) -> None: ...

    @abc.abstractmethod
    def _iter_actors(self) -> Iterator[str]: ...

    @abc.abstractmethod
    def _actor_count(self) -> int: ...

    @abc.abstractmethod
    def _contains_node(self, nl: NodeLayer) -> bool: ...

    @abc.abstractmethod
    def _insert_node(self, nl: NodeLayer, attrs: dict) -> None: ...

    @abc.abstractmethod
    def _delete_nodes(self, nls: list[NodeLayer]) -> None:
        """Remove existing node-layers and every edge incident to any of them."""

    @abc.abstractmethod
    def _iter_nodes(self) -> Iterator[NodeLayer]: ...

    @abc.abstractmethod
    def _node_count(self) -> int: ...

    @abc.abstractmethod
    def _node_attr_map(self, nl: NodeLayer) -> dict: ...

    @abc.abstractmethod
    def _contains_edge(self, u: NodeLayer, v: NodeLayer) -> bool: ...

    @abc.abstractmethod
    def _insert_edge(self, u: NodeLayer, v: NodeLayer, attrs: dict) -> None: ...

    @abc.abstractmethod
    def _delete_edge(self, u: NodeLayer, v: NodeLayer) -> None: ...

    @abc.abstractmethod
    def _iter_edges(self) -> Iterator[Edge]:
        """Yield every edge once, endpoints ordered so that ``u < v``."""

    @abc.abstractmethod
    def _edge_count(self) -> int: ...

    @abc.abstractmethod
    def _edge_attr_map(self, u: NodeLayer, v: NodeLayer) -> dict: ...

    @abc.abstractmethod
    def _iter_neighbors(self, nl: NodeLayer) -> Iterator[NodeLayer]: ...
