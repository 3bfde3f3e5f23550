"""Lumping detectors: the invariance-matrix pipelines and four baselines.

Every detector takes a transition matrix, the number of aggregates ``k`` and a master
``seed``, and returns a :class:`DetectionResult` carrying the partition and its
commutation residual.
"""
import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._random import seed_sequence, substream
from .clustering import DEFAULT_MAX_ITER, DEFAULT_RESTARTS, Embedding, kmeans
from .errors import (
    DecompositionFailure,
    DegenerateInput,
    EigenFailure,
    ZeroAggregateMass,
    ZeroStationaryMass,
)
from .markov import (
    Partition,
    as_transition_matrix,
    commutation_residual,
    sort_eigenvalues,
    stationary_distribution,
)
from .spectral import SpectralShift, build_invariance_matrix, fix_gauge, smallest_eigenpairs


class Method(enum.Enum):
    Q_METASTABLE = "q-metastable"
    Q_GENERAL = "q-general"
    P_EIGS = "p-eigs"
    SVD = "svd"
    FROYLAND = "froyland"
    ITER_CLUSTER = "iter-cluster"


@dataclass(frozen=True, eq=False)
class DetectionResult:
    partition: Partition
    delta: float
    method: Method
    shifts_used: tuple = ()
    converged: bool = True
    n_iter: int = 0


def _check_k(p, k):
    if not 2 <= k <= p.n:
        raise ValueError(f"need 2 <= k <= n={p.n}, got {k}")


def _cluster(columns, k, seed, restarts=DEFAULT_RESTARTS, max_iter=DEFAULT_MAX_ITER):
    return kmeans(Embedding.from_columns(columns), k, seed, restarts, max_iter)


def _result(p, partition, method, **extra):
    return DetectionResult(partition, commutation_residual(p, partition), method, **extra)


def detect_metastable(p, k, seed=0):
    """Cluster states by their entries in the ``k`` lowest eigenvectors of ``Q(1)``."""
    p = as_transition_matrix(p)
    _check_k(p, k)
    _, vectors = smallest_eigenpairs(build_invariance_matrix(p, 1.0), k)
    partition = _cluster(vectors, k, seed_sequence(seed, 0))
    return _result(p, partition, Method.Q_METASTABLE, shifts_used=(SpectralShift(1.0),))


def sample_shifts(rng, count):
    """``count`` points uniform by area on the closed unit disk."""
    radius = np.sqrt(rng.random(count))
    angle = 2.0 * np.pi * rng.random(count)
    return [SpectralShift(complex(r * np.cos(a), r * np.sin(a))) for r, a in zip(radius, angle)]


def _shift_embedding(p, shifts):
    columns = [smallest_eigenpairs(build_invariance_matrix(p, s), 1)[1][:, 0] for s in shifts]
    return np.column_stack(columns)


def detect_general(p, k, n_shifts=None, repeats=10, seed=0, shifts=None):
    """Random-shift search for a general (not necessarily metastable) lumping.

    Each repeat draws ``n_shifts`` shifts on the unit disk, embeds every state by its entries in
    the lowest eigenvector of each ``Q(shift)``, clusters into ``k`` aggregates and scores the
    result by its commutation residual. The repeat with the smallest residual wins (ties to
    the earliest). Repeats whose embedding has fewer than ``k`` distinct rows, or whose partition
    has an aggregate without stationary mass, are skipped.
    Passing ``shifts`` skips sampling and runs a single repeat with them.
    """
    p = as_transition_matrix(p)
    _check_k(p, k)
    n_shifts = k if n_shifts is None else n_shifts
    if shifts is not None:
        shifts = [s if isinstance(s, SpectralShift) else SpectralShift(s) for s in shifts]
        if not shifts:
            raise ValueError("shift override must not be empty")
        plan = [shifts]
    else:
        if not 1 <= n_shifts <= 8:
            raise ValueError(f"n_shifts must lie in 1..8, got {n_shifts}")
        if repeats < 1:
            raise ValueError("repeats must be at least 1")
        plan = [sample_shifts(substream(seed, 1, r), n_shifts) for r in range(repeats)]
    v = stationary_distribution(p)
    best = None
    failure = None
    for r, trial in enumerate(plan):
        try:
            partition = _cluster(_shift_embedding(p, trial), k, seed_sequence(seed, 2, r))
            delta = commutation_residual(p, partition, v)
        except (DegenerateInput, ZeroAggregateMass) as exc:
            # this repeat produced no scorable partition; later repeats may
            failure = exc
            continue
        if best is None or delta < best[0]:
            best = (delta, partition, tuple(trial))
    if best is None:
        raise failure
    delta, partition, used = best
    return DetectionResult(partition, delta, Method.Q_GENERAL, shifts_used=used)


def _normalize_columns(vectors):
    return fix_gauge(vectors / np.linalg.norm(vectors, axis=0))


def p_eigenvectors(p, k):
    """Right eigenvectors of ``p`` for its ``k`` eigenvalues of largest modulus."""
    a = p.entries if hasattr(p, "entries") else np.asarray(p, dtype=float)
    try:
        values, vectors = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    order = sort_eigenvalues(values)[:k]
    return values[order], _normalize_columns(vectors[:, order])


def baseline_p_eigenvectors(p, k, seed=0):
    p = as_transition_matrix(p)
    _check_k(p, k)
    _, vectors = p_eigenvectors(p, k)
    if np.all(np.abs(vectors.imag) == 0.0):
        vectors = vectors.real
    return _result(p, _cluster(vectors, k, seed_sequence(seed, 0)), Method.P_EIGS)


def baseline_svd(p, k, seed=0, vectors="both"):
    """Cluster on the ``k`` leading singular vectors of ``p``.

    ``vectors`` selects ``"both"`` (left and right, 2k coordinates), ``"left"`` (eigenvectors of
    ``P P^T``) or ``"right"``.
    """
    p = as_transition_matrix(p)
    _check_k(p, k)
    try:
        u, _, vt = np.linalg.svd(p.entries)
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailure(str(exc)) from exc
    left, right = fix_gauge(u[:, :k]), fix_gauge(vt[:k].T)
    columns = {"both": np.hstack([left, right]), "left": left, "right": right}[vectors]
    return _result(p, _cluster(columns, k, seed_sequence(seed, 0)), Method.SVD)


def reversibilize(p, v=None):
    """Additive reversibilization ``(P + D^-1 P^T D) / 2`` with ``D = diag(v)``."""
    p = as_transition_matrix(p)
    v = np.asarray(stationary_distribution(p) if v is None else v, dtype=float)
    small = np.flatnonzero(v < 1e-15)
    if small.size:
        raise ZeroStationaryMass(int(small[0]))
    a = p.entries
    return 0.5 * (a + (a.T * v[None, :]) / v[:, None]), v


def baseline_froyland(p, k, seed=0):
    """Cluster on the top ``k`` right eigenvectors of the stationary reversibilization."""
    p = as_transition_matrix(p)
    _check_k(p, k)
    r, v = reversibilize(p)
    root = np.sqrt(v)
    sym = root[:, None] * r / root[None, :]
    sym = 0.5 * (sym + sym.T)
    try:
        values, w = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    top = np.argsort(-values, kind="stable")[:k]
    vectors = _normalize_columns(w[:, top] / root[:, None])
    return _result(p, _cluster(vectors, k, seed_sequence(seed, 0)), Method.FROYLAND)


def random_partition(n, k, rng):
    """Uniformly random labels with every aggregate non-empty."""
    labels = rng.integers(k, size=n)
    labels[rng.permutation(n)[:k]] = np.arange(k)
    return Partition(labels, k)


def baseline_iterative_clustering(p, k, seed=0, max_iter=200, init=None):
    """Reassign states to the aggregate whose reduced row best matches their ``P Pi`` row.

    Starts from a seeded random assignment (or ``init``) and stops at a fixed point or after
    ``max_iter`` passes; ``converged`` on the result reports which.
    """
    p = as_transition_matrix(p)
    _check_k(p, k)
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if init is None:
        start = random_partition(p.n, k, substream(seed, 0))
    else:
        start = init if isinstance(init, Partition) else Partition(init, k)
    v = stationary_distribution(p)
    labels, n_iter, converged = kernels.iterate_lumping(p.entries, v.weights, start.labels, k, max_iter)
    partition = Partition(labels, k)
    return DetectionResult(
        partition,
        commutation_residual(p, partition, v),
        Method.ITER_CLUSTER,
        converged=converged,
        n_iter=n_iter,
    )


DETECTORS = {
    Method.Q_METASTABLE: detect_metastable,
    Method.Q_GENERAL: detect_general,
    Method.P_EIGS: baseline_p_eigenvectors,
    Method.SVD: baseline_svd,
    Method.FROYLAND: baseline_froyland,
    Method.ITER_CLUSTER: baseline_iterative_clustering,
}


def detect(method, p, k, seed=0, **options):
    """Dispatch to the detector for ``method`` (a :class:`Method` or its string value)."""
    return DETECTORS[Method(method)](p, k, seed=seed, **options)
