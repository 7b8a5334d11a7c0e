"""In-memory multilayer network storage with interchangeable backends."""

from mlnstore import errors
from mlnstore.backends import (
    BACKENDS,
    AdjacencyStore,
    CanonicalForm,
    DenseMatrixStore,
    EdgeTableStore,
    MatrixStore,
    make_store,
    snapshot_canonical,
)
from mlnstore.fileio import dumps, load, loads, read_mln, save, write_mln
from mlnstore.generator import ErConfig, generate_er
from mlnstore.model import DimensionSchema, Edge, LayerContents, LayerRef, MultilayerStore, NodeLayer
from mlnstore.operators import diff_layer, filter_layer, flatten_layer, project_layer
from mlnstore.predicate import NodeContext, evaluate, parse

__version__ = "0.1.0"

__all__ = [
    "AdjacencyStore",
    "BACKENDS",
    "CanonicalForm",
    "DenseMatrixStore",
    "DimensionSchema",
    "Edge",
    "EdgeTableStore",
    "ErConfig",
    "LayerContents",
    "LayerRef",
    "MatrixStore",
    "MultilayerStore",
    "NodeContext",
    "NodeLayer",
    "diff_layer",
    "dumps",
    "errors",
    "evaluate",
    "filter_layer",
    "flatten_layer",
    "generate_er",
    "load",
    "loads",
    "make_store",
    "parse",
    "project_layer",
    "read_mln",
    "save",
    "snapshot_canonical",
    "write_mln",
]
