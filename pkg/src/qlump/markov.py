"""Transition matrices, partitions, lumped chains and the lumpability residual.

States are 0-indexed everywhere. The 3-state example used throughout the tests,

    P = 1/4 [[3, 0, 1],
             [1, 2, 1],
             [0, 2, 2]],

lumps exactly as ``labels=(0, 0, 1)``, i.e. states {1, 2} and {3} in 1-indexed notation.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EigenFailure,
    InvalidPartition,
    NegativeEntry,
    NoConvergence,
    RowSumViolation,
    TooSmall,
    ValidationError,
    ZeroAggregateMass,
)

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-13
MASS_TOL = 1e-15


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Dense row-stochastic matrix. Construction validates; the stored array is read-only."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"transition matrix must be square, got shape {a.shape}")
        n = a.shape[0]
        if n < 2:
            raise TooSmall(n)
        a = _frozen(a)
        if not np.all(np.isfinite(a)):
            raise ValidationError("transition matrix has non-finite entries")
        neg = np.argwhere(a < 0)
        if len(neg):
            i, j = (int(x) for x in neg[0])
            raise NegativeEntry(i, j, float(a[i, j]))
        sums = a.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) >= ROW_SUM_TOL)
        if len(bad):
            raise RowSumViolation(int(bad[0]), float(sums[bad[0]]))
        object.__setattr__(self, "entries", a)

    @property
    def n(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"TransitionMatrix(n={self.n})"


def validate_stochastic(raw):
    """Wrap ``raw`` as a :class:`TransitionMatrix`, raising on any violated invariant."""
    return TransitionMatrix(raw)


def as_transition_matrix(p):
    return p if isinstance(p, TransitionMatrix) else TransitionMatrix(p)


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of ``n`` states to ``k`` non-empty aggregates labelled ``0..k-1``."""

    labels: np.ndarray
    k: int = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise InvalidPartition("labels must be a non-empty 1-d sequence")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise InvalidPartition("labels must be integers")
        labels = _frozen(labels, dtype=np.int64)
        k = int(labels.max()) + 1 if self.k is None else int(self.k)
        if not 1 <= k <= labels.size:
            raise InvalidPartition(f"need 1 <= k <= n, got k={k}, n={labels.size}")
        if labels.min() < 0 or labels.max() >= k:
            raise InvalidPartition(f"labels must lie in 0..{k - 1}")
        missing = np.setdiff1d(np.arange(k), labels)
        if missing.size:
            raise InvalidPartition(f"aggregate {int(missing[0])} is empty")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "k", k)

    @property
    def n(self):
        return self.labels.size

    def members(self, k):
        return np.flatnonzero(self.labels == k)

    def canonical(self):
        """Relabel aggregates in order of first occurrence."""
        return Partition(canonical_labels(self.labels), self.k)

    def __eq__(self, other):
        return (
            isinstance(other, Partition)
            and self.k == other.k
            and np.array_equal(self.labels, other.labels)
        )

    def __hash__(self):
        return hash((self.k, self.labels.tobytes()))

    def __repr__(self):
        return f"Partition({self.labels.tolist()}, k={self.k})"


def as_partition(pi):
    return pi if isinstance(pi, Partition) else Partition(pi)


def canonical_labels(labels):
    labels = np.asarray(labels)
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    relabel = np.empty(labels.max() + 1, dtype=np.int64)
    relabel[order] = np.arange(order.size)
    return relabel[labels]


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    weights: np.ndarray
    iterations: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights))

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)


@dataclass(frozen=True, eq=False)
class LumpedChain:
    p_tilde: np.ndarray
    aggregate_mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p_tilde", _frozen(self.p_tilde))
        object.__setattr__(self, "aggregate_mass", _frozen(self.aggregate_mass))


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues, dtype=complex))

    def __len__(self):
        return self.eigenvalues.size

    def __iter__(self):
        return iter(self.eigenvalues)


def stationary_distribution(p, tol=STATIONARY_TOL, max_iter=None):
    """Left fixed point of ``p`` by undamped power iteration from the uniform vector.

    Stops when successive iterates differ by less than ``tol`` in the max norm; raises
    :class:`NoConvergence` after ``100 * n`` iterations (periodic or very slowly mixing chains).
    For reducible chains the result is the limit reached from the uniform start.
    """
    p = as_transition_matrix(p)
    a = p.entries
    n = p.n
    max_iter = 100 * n if max_iter is None else max_iter
    v = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        w = v @ a
        w /= w.sum()
        if np.max(np.abs(w - v)) < tol:
            return StationaryDistribution(w, it)
        v = w
    raise NoConvergence(max_iter)


def to_indicator(pi):
    """n x K 0/1 matrix with a 1 at (i, k) iff state i belongs to aggregate k."""
    pi = as_partition(pi)
    out = np.zeros((pi.n, pi.k))
    out[np.arange(pi.n), pi.labels] = 1.0
    return out


def _check_dims(p, pi, v=None):
    if pi.n != p.n:
        raise DimensionMismatch(f"partition has {pi.n} states, matrix has {p.n}")
    if v is not None and np.asarray(v).shape != (p.n,):
        raise DimensionMismatch(f"stationary vector has shape {np.asarray(v).shape}, expected ({p.n},)")


def lump(p, pi, v=None):
    """Reduced K x K chain, rows averaged with stationary weights of the source states.

    ``P~[k, l] = sum_{i in L_k} v_i sum_{j in L_l} P_ij / sum_{i in L_k} v_i``.
    When every row of an aggregate has the same block sums this is exactly that common value.
    """
    p = as_transition_matrix(p)
    pi = as_partition(pi)
    if v is None:
        v = stationary_distribution(p)
    v = np.asarray(v, dtype=float)
    _check_dims(p, pi, v)
    indicator = to_indicator(pi)
    block_sums = p.entries @ indicator
    mass = indicator.T @ v
    empty = np.flatnonzero(mass < MASS_TOL)
    if empty.size:
        raise ZeroAggregateMass(int(empty[0]))
    p_tilde = (indicator.T @ (v[:, None] * block_sums)) / mass[:, None]
    # Rows of an exactly lumpable aggregate are all equal; reproduce them without averaging noise.
    for k in range(pi.k):
        rows = block_sums[pi.labels == k]
        if np.all(rows == rows[0]):
            p_tilde[k] = rows[0]
    return LumpedChain(p_tilde, mass / mass.sum())


def commutation_residual(p, pi, v=None):
    """Frobenius norm of ``P Pi - Pi P~``; zero iff ``pi`` is an exact lumping of ``p``."""
    p = as_transition_matrix(p)
    pi = as_partition(pi)
    chain = lump(p, pi, v)
    indicator = to_indicator(pi)
    resid = p.entries @ indicator - chain.p_tilde[pi.labels]
    return float(np.linalg.norm(resid))


def max_row_deviation(p, pi):
    """Largest spread (max - min over i in L_k) of the block sums ``sum_{j in L_l} P_ij``."""
    p = as_transition_matrix(p)
    pi = as_partition(pi)
    _check_dims(p, pi)
    block_sums = p.entries @ to_indicator(pi)
    worst = 0.0
    for k in range(pi.k):
        rows = block_sums[pi.labels == k]
        worst = max(worst, float(np.max(rows.max(axis=0) - rows.min(axis=0))))
    return worst


def sort_eigenvalues(values):
    """Indices ordering ``values`` by descending modulus, then real part, then imaginary part."""
    values = np.asarray(values, dtype=complex)
    return np.lexsort((-values.imag, -values.real, -np.abs(values)))


def spectrum(p):
    """All eigenvalues of the (generally non-symmetric) matrix ``p``."""
    a = p.entries if isinstance(p, TransitionMatrix) else np.asarray(p, dtype=float)
    try:
        values = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return Spectrum(values[sort_eigenvalues(values)])
