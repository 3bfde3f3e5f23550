"""Seeded random transition matrices with a planted block structure.

Three families are provided:

* block-diagonal dominant: ``P = (1 - eps) B + eps A`` with ``B`` block diagonal;
* sparse masked: entries kept with probability ``delta`` inside blocks and ``eps`` between blocks;
* block stochastic: block ``(i, j)`` equals ``P~[i, j] * a_ij`` with every ``a_ij`` row-stochastic,
  so the planted partition is an exact lumping.

All randomness flows from ``GeneratorConfig.seed`` through keyed substreams unless an explicit
``numpy.random.Generator`` is passed.
"""
from dataclasses import dataclass

import numpy as np

from ._random import substream
from .errors import DimensionMismatch, GenerationExhausted, InvalidConfig
from .markov import Partition, TransitionMatrix, as_transition_matrix

CLASSES = ("blockdiag", "sparse", "blockstoch")
MAX_ATTEMPTS = 1000

# substream keys
_LAYOUT, _MAIN, _NOISE = 0, 1, 2


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    m: int
    block_sizes: tuple
    epsilon: float = 0.0
    delta: float = None
    seed: int = 0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        object.__setattr__(self, "block_sizes", sizes)
        if len(sizes) != self.m:
            raise InvalidConfig(f"{len(sizes)} block sizes given for m={self.m}")
        if sum(sizes) != self.n:
            raise InvalidConfig(f"block sizes sum to {sum(sizes)}, expected n={self.n}")
        if min(sizes) < 2:
            raise InvalidConfig("every block needs at least 2 states")
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidConfig(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.delta is not None and not 0.0 <= self.delta <= 1.0:
            raise InvalidConfig(f"delta must lie in [0, 1], got {self.delta}")

    @classmethod
    def draw(cls, n, epsilon=0.0, seed=0, m=None, delta=None):
        """Config with ``m`` (default: uniform on {3, 4, 5}) and block sizes drawn from ``seed``.

        Block sizes are a uniform composition of ``n`` with a floor of ``max(2, n // (4 m))``.
        """
        rng = substream(seed, _LAYOUT)
        if m is None:
            m = int(rng.integers(3, 6))
        floor = max(2, n // (4 * m))
        rest = n - m * floor
        if rest < 0:
            raise InvalidConfig(f"n={n} too small for {m} blocks of at least {floor} states")
        bars = np.sort(rng.choice(rest + m - 1, size=m - 1, replace=False))
        parts = np.diff(np.concatenate(([-1], bars, [rest + m - 1]))) - 1
        return cls(n, m, tuple(int(floor + x) for x in parts), epsilon, delta, seed)

    def to_header(self):
        """Flat ``key=value`` provenance lines."""
        return "\n".join(
            [
                f"n={self.n}",
                f"m={self.m}",
                "block_sizes=" + ",".join(str(s) for s in self.block_sizes),
                f"epsilon={self.epsilon!r}",
                f"delta={'' if self.delta is None else repr(self.delta)}",
                f"seed={self.seed}",
            ]
        )

    def truth(self):
        return Partition(np.repeat(np.arange(self.m), self.block_sizes), self.m)

    def offsets(self):
        return np.concatenate(([0], np.cumsum(self.block_sizes)))


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    matrix: TransitionMatrix
    truth: Partition
    config: GeneratorConfig


def _uniform_rows(rng, rows, cols):
    a = rng.random((rows, cols))
    sums = a.sum(axis=1)
    while np.any(sums == 0.0):  # probability zero, kept for completeness
        bad = sums == 0.0
        a[bad] = rng.random((int(bad.sum()), cols))
        sums = a.sum(axis=1)
    return a / sums[:, None]


def gen_random_stochastic(n, rng, cols=None):
    """i.i.d. uniform [0, 1] entries, each row divided by its sum.

    With ``cols`` set, returns an ``n x cols`` row-stochastic array instead of a
    :class:`TransitionMatrix`.
    """
    if cols is not None:
        return _uniform_rows(rng, n, cols)
    if n < 2:
        raise InvalidConfig(f"n must be at least 2, got {n}")
    return TransitionMatrix(_uniform_rows(rng, n, n))


def mix(b, a, epsilon):
    """Convex combination ``(1 - epsilon) b + epsilon a``."""
    b = as_transition_matrix(b)
    a = as_transition_matrix(a)
    if a.n != b.n:
        raise DimensionMismatch(f"cannot mix {b.n}x{b.n} with {a.n}x{a.n}")
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidConfig(f"epsilon must lie in [0, 1], got {epsilon}")
    if epsilon == 0.0:
        return b
    if epsilon == 1.0:
        return a
    return TransitionMatrix((1.0 - epsilon) * b.entries + epsilon * a.entries)


def _streams(config, rng):
    if rng is not None:
        return rng, rng
    return substream(config.seed, _MAIN), substream(config.seed, _NOISE)


def gen_block_diag_dominant(config, rng=None):
    """``(1 - eps) B + eps A``: ``B`` block diagonal, ``A`` fully random."""
    main, noise = _streams(config, rng)
    n = config.n
    b = np.zeros((n, n))
    off = config.offsets()
    for lo, hi in zip(off[:-1], off[1:]):
        b[lo:hi, lo:hi] = _uniform_rows(main, hi - lo, hi - lo)
    a = gen_random_stochastic(n, noise)
    return PlantedInstance(mix(TransitionMatrix(b), a, config.epsilon), config.truth(), config)


def gen_sparse_masked(config, rng=None):
    """Uniform entries masked with density ``delta`` inside blocks and ``epsilon`` between them.

    The whole matrix is redrawn whenever a row comes out all zero.
    """
    if config.delta is None:
        raise InvalidConfig("sparse class needs delta")
    if config.delta < config.epsilon:
        raise InvalidConfig(f"need delta >= epsilon, got delta={config.delta}, epsilon={config.epsilon}")
    main, _ = _streams(config, rng)
    labels = config.truth().labels
    density = np.where(labels[:, None] == labels[None, :], config.delta, config.epsilon)
    for _ in range(MAX_ATTEMPTS):
        mask = main.random((config.n, config.n)) < density
        raw = np.where(mask, main.random((config.n, config.n)), 0.0)
        sums = raw.sum(axis=1)
        if np.all(sums > 0.0):
            return PlantedInstance(TransitionMatrix(raw / sums[:, None]), config.truth(), config)
    raise GenerationExhausted(MAX_ATTEMPTS)


def gen_block_stochastic(config, rng=None):
    """Exactly lumpable matrix with blocks ``P~[i, j] * a_ij`` (``config.epsilon`` is not applied)."""
    main, _ = _streams(config, rng)
    reduced = _uniform_rows(main, config.m, config.m)
    off = config.offsets()
    p = np.empty((config.n, config.n))
    for i in range(config.m):
        for j in range(config.m):
            rows, cols = config.block_sizes[i], config.block_sizes[j]
            p[off[i]:off[i + 1], off[j]:off[j + 1]] = reduced[i, j] * _uniform_rows(main, rows, cols)
    return PlantedInstance(TransitionMatrix(p), config.truth(), config)


def make_instance(cls, n, epsilon, seed, m=None, delta=None, block_sizes=None):
    """Benchmark instance of family ``cls`` fully determined by its arguments.

    For ``blockstoch`` the exactly lumpable matrix is mixed with a fresh random matrix at
    weight ``epsilon``.
    """
    if cls not in CLASSES:
        raise InvalidConfig(f"unknown generator class {cls!r}; choose from {CLASSES}")
    if block_sizes is not None:
        config = GeneratorConfig(n, len(block_sizes), tuple(block_sizes), epsilon, delta, seed)
    else:
        config = GeneratorConfig.draw(n, epsilon, seed, m=m, delta=delta)
    if cls == "blockdiag":
        return gen_block_diag_dominant(config)
    if cls == "sparse":
        return gen_sparse_masked(config)
    inst = gen_block_stochastic(config)
    noise = gen_random_stochastic(n, substream(seed, _NOISE))
    return PlantedInstance(mix(inst.matrix, noise, epsilon), inst.truth, config)
