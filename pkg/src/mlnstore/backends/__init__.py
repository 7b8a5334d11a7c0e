"""Interchangeable implementations of :class:`~mlnstore.model.MultilayerStore`."""

from mlnstore import errors
from mlnstore.backends.adjacency import AdjacencyStore
from mlnstore.backends.canonical import CanonicalForm, snapshot_canonical
from mlnstore.backends.edgetable import EdgeTableStore
from mlnstore.backends.matrix import DENSE_NODE_CAP, DenseMatrixStore, MatrixStore

BACKENDS = {
    "adjacency": AdjacencyStore,
    "edgetable": EdgeTableStore,
    "matrix": MatrixStore,
}

# benchmark-only layout; never handed out unless explicitly requested
DEMO_BACKENDS = {"matrix-dense": DenseMatrixStore}


def make_store(name: str, schema=None, allow_dense: bool = False):
    if name in BACKENDS:
        return BACKENDS[name](schema)
    if allow_dense and name in DEMO_BACKENDS:
        return DEMO_BACKENDS[name](schema)
    raise errors.UnknownBackend(f"unknown backend {name!r}; choose from {sorted(BACKENDS)}")


__all__ = [
    "AdjacencyStore",
    "BACKENDS",
    "CanonicalForm",
    "DENSE_NODE_CAP",
    "DEMO_BACKENDS",
    "DenseMatrixStore",
    "EdgeTableStore",
    "MatrixStore",
    "make_store",
    "snapshot_canonical",
]
