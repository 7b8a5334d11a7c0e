"""Random operation logs and brute-force oracles shared by the test modules.

Oracles work on canonical snapshots (plain sorted tuples), never on the
operator implementations they check.
"""

from __future__ import annotations

import random
from collections import Counter
from itertools import combinations

from mlnstore import errors
from mlnstore.backends import BACKENDS, snapshot_canonical
from mlnstore.model import NodeLayer

BACKEND_NAMES = sorted(BACKENDS)

# ------------------------------------------------------------ operation logs


def random_schema(rng: random.Random, d: int | None = None) -> dict[str, list[str]]:
    d = d or rng.choice([1, 2])
    schema = {}
    for k in range(d):
        schema[f"d{k}"] = [f"L{k}{i}" for i in range(rng.choice([2, 3]))]
    return schema


def network_log(rng: random.Random, n: int, schema: dict[str, list[str]], edge_factor=2.0):
    """Operations that build one random network; a few are expected to fail."""
    log = []
    actors = [f"v{i}" for i in range(n)]
    placed = []
    coords = [tuple(c) for c in _all_coords(schema)]
    for a in actors:
        for c in rng.sample(coords, k=rng.randint(1, len(coords))):
            log.append(("add_node", a, c))
            placed.append((a, c))
    by_coord: dict[tuple, list[str]] = {}
    for a, c in placed:
        by_coord.setdefault(c, []).append(a)
    for _ in range(int(edge_factor * len(placed))):
        a, ca = rng.choice(placed)
        r = rng.random()
        if r < 0.6:
            b, cb = rng.choice(by_coord[ca]), ca  # intralayer
        elif r < 0.85:
            cb = list(ca)
            k = rng.randrange(len(cb))
            cb[k] = rng.choice(list(schema.values())[k])  # move along one dimension
            cb = tuple(cb)
            b = rng.choice(by_coord.get(cb, [a]))
        else:
            b, cb = rng.choice(placed)
        log.append(("add_edge", a, ca, b, cb))
    for _ in range(max(1, n // 5)):
        a, c = rng.choice(placed)
        log.append(("update_node", a, c, rng.choice(["color", "size"]),
                    rng.choice(["red", "blue", 1.0, 2.5])))
    return log


def _all_coords(schema):
    coords = [()]
    for layers in schema.values():
        coords = [c + (l,) for c in coords for l in layers]
    return coords


def mixed_log(rng: random.Random, length: int, n_actors: int = 12, junk: float = 0.12):
    """A long log mixing layer-definition and data-manipulation operations.

    Arguments are chosen against a reference store driven alongside, so most
    operations succeed; a ``junk`` fraction is deliberately invalid.
    """
    from mlnstore.backends import AdjacencyStore

    ref = AdjacencyStore()
    dims = ["d0", "d1", "d2"]
    layer_pool = ["x", "y", "z", "w"]
    actors = [f"v{i}" for i in range(n_actors)]
    log = [("create_dimension", "d0", "x")]
    replay(ref, log)

    def coord():
        if rng.random() < junk:
            return tuple(rng.choice(layer_pool) for _ in range(rng.choice([1, 2, 3])))
        return tuple(rng.choice(ref.layers(d)) for d in ref.schema.names)

    def node():
        nodes = list(ref.nodes())
        if nodes and rng.random() > junk:
            nl = rng.choice(nodes)
            return nl.actor, nl.coord
        return rng.choice(actors), coord()

    def edge():
        edges = list(ref.edges())
        if edges and rng.random() > junk:
            e = rng.choice(edges)
            u, v = (e.u, e.v) if rng.random() < 0.5 else (e.v, e.u)
            return u.actor, u.coord, v.actor, v.coord
        return (*node(), *node())

    for _ in range(length):
        r = rng.random()
        if r < 0.03:
            op = ("create_dimension", rng.choice(dims), rng.choice(layer_pool))
        elif r < 0.05:
            op = ("delete_dimension", rng.choice(dims))
        elif r < 0.09:
            op = ("create_layer", rng.choice(dims), rng.choice(layer_pool))
        elif r < 0.11:
            op = ("delete_layer", rng.choice(dims), rng.choice(layer_pool))
        elif r < 0.35:
            op = ("add_node", rng.choice(actors), coord())
        elif r < 0.40:
            op = ("remove_node", *node())
        elif r < 0.46:
            op = ("update_node", *node(), "" if rng.random() < junk else rng.choice(["k", "c"]),
                  rng.choice([rng.random(), "s"]))
        elif r < 0.72:
            a, ca = node()
            if rng.random() < 0.6:
                # prefer a partner in the same layer coordinate
                same = [nl for nl in ref.nodes() if nl.coord == ca]
                b, cb = (rng.choice(same).actor, ca) if same else node()
            else:
                b, cb = node()
            op = ("add_edge", a, ca, b, cb)
        elif r < 0.80:
            op = ("remove_edge", *edge())
        elif r < 0.88:
            op = ("update_edge", *edge(), "w", rng.choice([1.0, "s"]))
        elif r < 0.95:
            op = ("neighbors", *node())
        else:
            op = ("layer_contents", rng.choice(dims), rng.choice(layer_pool))
        log.append(op)
        replay(ref, [op])
    return log


def attributed_log(rng: random.Random, n: int, schema: dict[str, list[str]]):
    """``network_log`` plus isolated actors and edge attributes with awkward text."""
    log = network_log(rng, n, schema)
    texts = ["", "plain", "a,b", 'say "hi"', "50%", "#tag", "k=v", "back\\slash", "line\nbreak", "ünï"]
    edges = [op[1:] for op in log if op[0] == "add_edge"]
    for _ in range(len(edges) // 2):
        key = rng.choice(["w", "label", "x y"])
        value = rng.choice(texts) if rng.random() < 0.5 else rng.uniform(-1e6, 1e6)
        log.append(("update_edge", *rng.choice(edges), key, value))
    for i in range(rng.randint(0, 3)):
        log.append(("add_actor", f"lonely{i}"))
    return log


def random_operator_instance(seed: int, backend: str = "adjacency", n: int | None = None):
    """A random network plus a dimension and two distinct layers of it to operate on."""
    rng = random.Random(seed)
    schema = random_schema(rng)
    store = BACKENDS[backend](schema)
    replay(store, network_log(rng, n or rng.randint(5, 40), schema))
    dim = rng.choice(list(schema))
    ls, lt = rng.sample(schema[dim], 2)
    return rng, store, dim, ls, lt


def random_predicate(rng: random.Random, depth: int = 0):
    from mlnstore.predicate import ActorName, And, Attr, Compare, Degree, LiteralBool, Not, Num, Or, Str

    r = rng.random()
    if depth > 4 or r < 0.35:
        if rng.random() < 0.1:
            return LiteralBool(rng.random() < 0.5)
        pool = [Degree(), ActorName(), Attr(rng.choice("abc")), Num(rng.uniform(-5, 5)),
                Str(rng.choice(["", "a", "red", "Z", 'q"uote'])), Num(float("inf"))]
        return Compare(rng.choice(pool), rng.choice(["==", "!=", "<", "<=", ">", ">="]), rng.choice(pool))
    if r < 0.55:
        return Not(random_predicate(rng, depth + 1))
    cls = And if r < 0.8 else Or
    return cls(random_predicate(rng, depth + 1), random_predicate(rng, depth + 1))


def random_context(rng: random.Random):
    from mlnstore.predicate import NodeContext

    values = [0.0, -1.0, 3.5, "", "red", "a", float("inf")]
    return NodeContext(rng.choice(["a", "b", ""]), rng.randint(0, 9),
                       {k: rng.choice(values) for k in "abc" if rng.random() < 0.6})


def replay(store, log):
    """Apply ``log``; return one outcome per operation (error name or read result)."""
    outcomes = []
    for op, *args in log:
        try:
            result = getattr(store, op)(*args)
            if op == "neighbors":
                result = sorted(result)
            elif op == "layer_contents":
                result = (result.node_count, result.edge_count, sorted(result.nodes),
                          sorted((e.u, e.v) for e in result.edges))
            else:
                result = None
            outcomes.append(("ok", result))
        except errors.MLNError as e:
            outcomes.append(("err", type(e).__name__))
    return outcomes


def build(backend: str, schema, log):
    store = BACKENDS[backend](schema)
    return store, replay(store, log)


# ------------------------------------------------------------------- oracles


def brute_neighbors(form, nl: NodeLayer) -> set[NodeLayer]:
    out = set()
    for u, v, _ in form.edges:
        if u == nl:
            out.add(v)
        elif v == nl:
            out.add(u)
    return out


def brute_layer(form, pos: int, layer: str):
    nodes = {nl for nl, _ in form.nodes if nl.coord[pos] == layer}
    edges = {(u, v) for u, v, _ in form.edges if u in nodes and v in nodes}
    return nodes, edges


def _sub(nl: NodeLayer, pos: int, layer: str) -> NodeLayer:
    c = list(nl.coord)
    c[pos] = layer
    return NodeLayer(nl.actor, tuple(c))


def _norm(u, v):
    return (u, v) if u <= v else (v, u)


def layer_view(form, pos: int, layer: str):
    """(nodes, {edge: attrs}) of one layer in a canonical snapshot."""
    nodes = {nl: dict(a) for nl, a in form.nodes if nl.coord[pos] == layer}
    edges = {(u, v): dict(a) for u, v, a in form.edges
             if u.coord[pos] == layer and v.coord[pos] == layer}
    return nodes, edges


def oracle_flatten(form, pos, ls, lt, lf):
    nodes = set()
    weights = Counter()
    for layer in (ls, lt):
        ln, le = brute_layer(form, pos, layer)
        nodes |= {_sub(nl, pos, lf) for nl in ln}
        for u, v in le:
            weights[_norm(_sub(u, pos, lf), _sub(v, pos, lf))] += 1
    return nodes, {e: float(w) for e, w in weights.items()}


def oracle_project(form, pos, ls, lt, lp):
    """Enumerate every candidate pair of ``lt`` and search for a common ``ls`` neighbour."""
    src_nodes, _ = brute_layer(form, pos, ls)
    tgt_nodes, _ = brute_layer(form, pos, lt)
    edge_set = {(u, v) for u, v, _ in form.edges}

    def linked(a, b):
        return _norm(a, b) in edge_set

    def rest(nl):
        return nl.coord[:pos] + nl.coord[pos + 1:]

    edges = set()
    for u, v in combinations(sorted(tgt_nodes), 2):
        if rest(u) != rest(v):
            continue
        for w in src_nodes:
            if rest(w) == rest(u) and linked(w, u) and linked(w, v):
                edges.add(_norm(_sub(u, pos, lp), _sub(v, pos, lp)))
                break
    return {_sub(nl, pos, lp) for nl in tgt_nodes}, edges


def oracle_diff(form, pos, ls, lt, ld):
    def key(u, v):
        a = (u.actor, u.coord[:pos] + u.coord[pos + 1:])
        b = (v.actor, v.coord[:pos] + v.coord[pos + 1:])
        return frozenset([a, b])

    src_nodes, src_edges = brute_layer(form, pos, ls)
    _, tgt_edges = brute_layer(form, pos, lt)
    gone = {key(u, v) for u, v in tgt_edges}
    edges = {_norm(_sub(u, pos, ld), _sub(v, pos, ld)) for u, v in src_edges if key(u, v) not in gone}
    return {_sub(nl, pos, ld) for nl in src_nodes}, edges


def oracle_filter(form, pos, layer, lq, keep):
    """``keep(actor, degree, attrs) -> bool`` is the predicate written as Python."""
    nodes, edges = brute_layer(form, pos, layer)
    attrs = {nl: dict(a) for nl, a in form.nodes}
    deg = Counter()
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    chosen = {nl for nl in nodes if keep(nl.actor, deg[nl], attrs[nl])}
    return (
        {_sub(nl, pos, lq) for nl in chosen},
        {_norm(_sub(u, pos, lq), _sub(v, pos, lq)) for u, v in edges if u in chosen and v in chosen},
    )


def canonical_bytes(store) -> bytes:
    return snapshot_canonical(store).to_bytes()
