"""Layer manipulation (flatten, project, diff) and layer query (filter) operators.

Each operator reads one or two elementary layers of a dimension and
materializes its result as a new layer of the same dimension.  Result nodes
are the source node-layers with the dimension's coordinate replaced by the
new layer name; all other coordinate positions are kept.  Source layers are
never modified.

Edges are matched across layers by *actor pair*: the two actors together
with their coordinates outside the operated dimension.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Union

from mlnstore import errors
from mlnstore.model import Edge, LayerRef, MultilayerStore, NodeLayer, ordered
from mlnstore.predicate import NodeContext, Predicate, evaluate, parse

WEIGHT = "weight"


def _check_binary(store: MultilayerStore, dimension: str, source: str, target: str, into: str) -> int:
    pos = store.dimension_index(dimension)
    for layer in (source, target):
        if not store.has_layer(dimension, layer):
            raise errors.UnknownLayer(f"unknown layer {layer!r} in dimension {dimension!r}")
    if source == target:
        raise errors.LayerIdentical(f"source and target are both {source!r}")
    if store.has_layer(dimension, into):
        raise errors.DuplicateLayer(f"layer {into!r} already exists in {dimension!r}")
    return pos


def _substitute(nl: NodeLayer, pos: int, layer: str) -> NodeLayer:
    c = nl.coord
    return NodeLayer(nl.actor, c[:pos] + (layer,) + c[pos + 1:])


def _pair_key(e: Edge, pos: int) -> tuple:
    """Endpoints with the operated dimension removed, in a fixed order."""
    a = (e.u.actor, e.u.coord[:pos] + e.u.coord[pos + 1:])
    b = (e.v.actor, e.v.coord[:pos] + e.v.coord[pos + 1:])
    return (a, b) if a <= b else (b, a)


def _copy_nodes(store: MultilayerStore, nodes, pos: int, into: str) -> None:
    for nl in nodes:
        new = _substitute(nl, pos, into)
        store.add_node(new.actor, new.coord, store.node_attrs(nl.actor, nl.coord))


def _add_edge(store: MultilayerStore, u: NodeLayer, v: NodeLayer, attrs=None) -> None:
    store.add_edge(u.actor, u.coord, v.actor, v.coord, attrs)


def flatten_layer(
    store: MultilayerStore, dimension: str, source: str, target: str, into: str
) -> LayerRef:
    """Aggregate two layers into ``into`` by edge union.

    Each result edge carries ``weight`` = number of source layers (1 or 2)
    holding that actor pair.  A node present in both layers appears once;
    on conflicting attribute keys the ``source`` layer's value wins.
    Interlayer edges are ignored.
    """
    pos = _check_binary(store, dimension, source, target, into)
    contents = [store.layer_contents(dimension, source), store.layer_contents(dimension, target)]

    merged: dict[NodeLayer, dict] = {}
    for part in reversed(contents):
        for nl in part.nodes:
            attrs = store.node_attrs(nl.actor, nl.coord)
            merged.setdefault(_substitute(nl, pos, into), {}).update(attrs)
    weights: Counter = Counter()
    for part in contents:
        for e in part.edges:
            weights[ordered(_substitute(e.u, pos, into), _substitute(e.v, pos, into))] += 1

    ref = store.create_layer(dimension, into)
    for nl, attrs in merged.items():
        store.add_node(nl.actor, nl.coord, attrs)
    for (u, v), w in weights.items():
        _add_edge(store, u, v, {WEIGHT: float(w)})
    return ref


def project_layer(
    store: MultilayerStore, dimension: str, source: str, target: str, into: str
) -> LayerRef:
    """One-mode projection of the ``source``/``target`` interlayer graph onto ``target``.

    ``u`` and ``v`` of ``target`` are linked in ``into`` when some node of
    ``source`` has interlayer edges to both.  Only interlayer edges whose
    endpoints agree on every other dimension count.
    """
    pos = _check_binary(store, dimension, source, target, into)
    nodes = store.layer_contents(dimension, target).nodes

    hubs: dict[NodeLayer, list[NodeLayer]] = defaultdict(list)
    for e in store.edges():
        cu, cv = e.u.coord, e.v.coord
        if cu[:pos] != cv[:pos] or cu[pos + 1:] != cv[pos + 1:]:
            continue
        if cu[pos] == source and cv[pos] == target:
            hubs[e.u].append(e.v)
        elif cu[pos] == target and cv[pos] == source:
            hubs[e.v].append(e.u)

    pairs = set()
    for members in hubs.values():
        members = sorted(members)
        for i, u in enumerate(members):
            for v in members[i + 1:]:
                pairs.add((u, v))

    ref = store.create_layer(dimension, into)
    _copy_nodes(store, nodes, pos, into)
    for u, v in sorted(pairs):
        _add_edge(store, _substitute(u, pos, into), _substitute(v, pos, into))
    return ref


def diff_layer(
    store: MultilayerStore, dimension: str, source: str, target: str, into: str
) -> LayerRef:
    """Copy ``source`` into ``into``, keeping only edges whose actor pair is absent from ``target``."""
    pos = _check_binary(store, dimension, source, target, into)
    src = store.layer_contents(dimension, source)
    reference = {_pair_key(e, pos) for e in store.layer_contents(dimension, target).edges}
    keep = [e for e in src.edges if _pair_key(e, pos) not in reference]

    ref = store.create_layer(dimension, into)
    _copy_nodes(store, src.nodes, pos, into)
    for e in keep:
        _add_edge(store, _substitute(e.u, pos, into), _substitute(e.v, pos, into), e.attrs)
    return ref


def filter_layer(
    store: MultilayerStore,
    layer: Union[LayerRef, tuple[str, str]],
    predicate: Union[str, Predicate],
    into: str,
) -> LayerRef:
    """Vertex-induced subgraph of ``layer`` on the nodes satisfying ``predicate``.

    ``degree`` in the predicate is the node's degree inside ``layer``.
    """
    dimension, name = layer
    if isinstance(predicate, str):
        predicate = parse(predicate)
    elif not hasattr(predicate, "__dataclass_fields__"):
        raise errors.PredicateTypeError(f"not a predicate: {predicate!r}")
    pos = store.dimension_index(dimension)
    contents = store.layer_contents(dimension, name)
    if store.has_layer(dimension, into):
        raise errors.DuplicateLayer(f"layer {into!r} already exists in {dimension!r}")

    degree: Counter = Counter()
    for e in contents.edges:
        degree[e.u] += 1
        degree[e.v] += 1
    chosen = []
    for nl in contents.nodes:
        attrs = store.node_attrs(nl.actor, nl.coord)
        if evaluate(predicate, NodeContext(nl.actor, degree[nl], attrs)):
            chosen.append((nl, attrs))
    kept = {nl for nl, _ in chosen}

    ref = store.create_layer(dimension, into)
    for nl, attrs in chosen:
        new = _substitute(nl, pos, into)
        store.add_node(new.actor, new.coord, attrs)
    for e in contents.edges:
        if e.u in kept and e.v in kept:
            _add_edge(store, _substitute(e.u, pos, into), _substitute(e.v, pos, into), e.attrs)
    return ref


OPERATORS = {
    "flatten": flatten_layer,
    "project": project_layer,
    "diff": diff_layer,
}
