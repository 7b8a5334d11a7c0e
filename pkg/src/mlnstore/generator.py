"""Seeded Erdős-Rényi multiplex generator.

Random numbers come from numpy's ``PCG64`` bit generator seeded through
``SeedSequence(seed)``.  Only its raw 64-bit output stream is used (numpy
keeps that stream stable across versions and platforms); doubles are
``(raw >> 11) * 2**-53``.  ``tests/data/rng_vectors.json`` pins the stream.

Edges are sampled by geometric skipping over the pair index space, so the
cost is proportional to the number of edges rather than ``n**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mlnstore import errors
from mlnstore.model import MultilayerStore

RNG_ALGORITHM = "numpy.random.PCG64/SeedSequence raw64; double = (raw >> 11) * 2**-53"


class StableRandom:
    def __init__(self, seed: int):
        self._bits = np.random.PCG64(np.random.SeedSequence(seed))

    def raw(self, size: int) -> np.ndarray:
        return self._bits.random_raw(size)

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in ``[0, 1)`` with 53 random bits each."""
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def sample_positions(rng: StableRandom, total: int, p: float) -> np.ndarray:
    """Sorted positions in ``range(total)``, each included independently with probability ``p``."""
    if total <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    log_q = math.log1p(-p)
    expected = total * p
    chunk = int(expected + 8 * math.sqrt(expected) + 64)
    found = []
    last = -1
    while True:
        u = rng.uniform(chunk)
        skips = np.floor(np.log1p(-u) / log_q).astype(np.int64)
        steps = last + np.cumsum(skips + 1)
        inside = steps[steps < total]
        found.append(inside)
        if len(inside) < chunk:
            break
        last = int(steps[-1])
    return np.concatenate(found)


def pair_index_to_nodes(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map row-major indices over ``{(i, j): 0 <= i < j < n}`` back to ``(i, j)``."""
    i = np.arange(n, dtype=np.int64)
    offsets = i * (n - 1) - i * (i - 1) // 2
    rows = np.searchsorted(offsets, k, side="right") - 1
    cols = k - offsets[rows] + rows + 1
    return rows, cols


@dataclass(frozen=True)
class ErConfig:
    layers: int = 2
    nodes: int = 100
    degree: float = 4.0
    interlayer_prob: float = 0.0
    seed: int = 0
    dimension: str = "layer"

    @property
    def p(self) -> float:
        if self.nodes == 1:
            return 0.0
        return self.degree / (self.nodes - 1)

    def validate(self) -> None:
        if not isinstance(self.layers, int) or self.layers < 1:
            raise errors.InvalidConfig(f"layer count must be >= 1, got {self.layers!r}")
        if not isinstance(self.nodes, int) or self.nodes < 1:
            raise errors.InvalidConfig(f"nodes per layer must be >= 1, got {self.nodes!r}")
        if not self.degree >= 0:
            raise errors.InvalidConfig(f"mean degree must be >= 0, got {self.degree!r}")
        if self.nodes == 1 and self.degree > 0:
            raise errors.InvalidConfig("a single node cannot have positive degree")
        if not 0.0 <= self.p <= 1.0:
            raise errors.InvalidConfig(
                f"edge probability k/(n-1) = {self.p:.4g} is outside [0, 1]"
            )
        if not 0.0 <= self.interlayer_prob <= 1.0:
            raise errors.InvalidConfig(f"interlayer probability {self.interlayer_prob!r} not in [0, 1]")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise errors.InvalidConfig(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not self.dimension:
            raise errors.InvalidConfig("dimension name must be non-empty")


def actor_name(i: int) -> str:
    return f"a{i}"


def layer_name(i: int) -> str:
    return f"l{i}"


def generate_er(config: ErConfig, store: MultilayerStore) -> None:
    """Fill a blank store with a node-aligned ER multiplex network.

    Every actor appears in every layer.  Within a layer each actor pair is
    linked with probability ``degree / (nodes - 1)``; between adjacent layers
    each pair of node-layers is linked with probability ``interlayer_prob``.
    """
    config.validate()
    if not store.is_blank():
        raise errors.NonEmptyStore("generate_er needs a blank store")
    n, dim = config.nodes, config.dimension
    rng = StableRandom(config.seed)
    names = [actor_name(i) for i in range(n)]
    layers = [layer_name(i) for i in range(config.layers)]

    store.create_dimension(dim, layers[0])
    for layer in layers[1:]:
        store.create_layer(dim, layer)
    for layer in layers:
        coord = (layer,)
        for a in names:
            store.add_node(a, coord)

    total = n * (n - 1) // 2
    for layer in layers:
        coord = (layer,)
        rows, cols = pair_index_to_nodes(sample_positions(rng, total, config.p), n)
        for i, j in zip(rows.tolist(), cols.tolist()):
            store.add_edge(names[i], coord, names[j], coord)
    for upper, lower in zip(layers, layers[1:]):
        picks = sample_positions(rng, n * n, config.interlayer_prob)
        for i, j in zip((picks // n).tolist(), (picks % n).tolist()):
            store.add_edge(names[i], (upper,), names[j], (lower,))
