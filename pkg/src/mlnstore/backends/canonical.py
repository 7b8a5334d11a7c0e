from __future__ import annotations

from dataclasses import dataclass

from mlnstore.model import AttributeValue, MultilayerStore, NodeLayer

AttrItems = tuple[tuple[str, AttributeValue], ...]


@dataclass(frozen=True)
class CanonicalForm:
    """Sorted, backend-independent listing of a network.

    Dimension order is kept (it fixes coordinate positions); everything else
    is sorted.  Two stores hold the same network exactly when their
    :meth:`to_bytes` outputs are equal.
    """

    schema: tuple[tuple[str, tuple[str, ...]], ...]
    actors: tuple[str, ...]
    nodes: tuple[tuple[NodeLayer, AttrItems], ...]
    edges: tuple[tuple[NodeLayer, NodeLayer, AttrItems], ...]

    def to_text(self) -> str:
        from mlnstore.fileio import render

        return render(self)

    def to_bytes(self) -> bytes:
        return self.to_text().encode("utf-8")

    def restricted_to(self, dimension: str, layers) -> "CanonicalForm":
        """Drop node-layers/edges touching layers of ``dimension`` not in ``layers``."""
        pos = [name for name, _ in self.schema].index(dimension)
        keep = set(layers)
        schema = tuple(
            (name, tuple(l for l in ls if l in keep) if name == dimension else ls)
            for name, ls in self.schema
        )
        nodes = tuple(n for n in self.nodes if n[0].coord[pos] in keep)
        edges = tuple(
            e for e in self.edges if e[0].coord[pos] in keep and e[1].coord[pos] in keep
        )
        return CanonicalForm(schema, self.actors, nodes, edges)


def _items(attrs) -> AttrItems:
    return tuple(sorted(attrs.items()))


def snapshot_canonical(store: MultilayerStore) -> CanonicalForm:
    schema = tuple((name, tuple(sorted(layers))) for name, layers in store.schema.dimensions)
    nodes = tuple(sorted((nl, _items(store._node_attr_map(nl))) for nl in store.nodes()))
    edges = tuple(sorted((e.u, e.v, _items(e.attrs)) for e in store.edges()))
    return CanonicalForm(schema, tuple(sorted(store.actors())), nodes, edges)
