"""Pure numpy implementations of the compiled kernels in ``_kernels.pyx``.

Every accumulation runs in the same order as the compiled loops (sequential over points,
then over coordinates), so both backends return bit-identical results.
"""
import numpy as np

MASS_TOL = 1e-15


def _sq_dist(x, centers):
    d = np.zeros((x.shape[0], centers.shape[0]))
    for t in range(x.shape[1]):
        diff = x[:, t, None] - centers[None, :, t]
        d += diff * diff
    return d


def _reseed_empty(labels, counts, mind, k):
    """Move the farthest point of a multi-member cluster into each empty cluster."""
    moved = []
    for j in range(k):
        if counts[j] == 0:
            eligible = np.where(counts[labels] > 1, mind, -1.0)
            far = int(np.argmax(eligible))
            counts[labels[far]] -= 1
            labels[far] = j
            counts[j] = 1
            mind[far] = 0.0
            moved.append((j, far))
    return moved


def lloyd(x, centers, max_iter):
    """Lloyd iterations from ``centers``.

    Returns ``(labels, centers, trace, converged)`` where ``trace[t]`` is the within-cluster
    sum of squares right after the ``t``-th assignment step.
    """
    x = np.ascontiguousarray(x, dtype=float)
    centers = np.array(centers, dtype=float, copy=True)
    n, k = x.shape[0], centers.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    trace = []
    converged = False
    for _ in range(max_iter):
        d = _sq_dist(x, centers)
        new = np.argmin(d, axis=1).astype(np.int64)
        mind = d[np.arange(n), new]
        counts = np.bincount(new, minlength=k)
        for j, far in _reseed_empty(new, counts, mind, k):
            centers[j] = x[far]
        trace.append(float(np.cumsum(mind)[-1]))
        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
        for t in range(x.shape[1]):
            centers[:, t] = np.bincount(labels, weights=x[:, t], minlength=k) / counts
    return labels, centers, np.array(trace), converged


def inertia(x, centers, labels):
    x = np.ascontiguousarray(x, dtype=float)
    d = np.zeros(x.shape[0])
    for t in range(x.shape[1]):
        diff = x[:, t] - centers[labels, t]
        d += diff * diff
    return float(np.cumsum(d)[-1])


def block_sums(p, labels, k):
    """``(P Pi)[i, l]``, accumulated over columns ``j`` in index order."""
    a = np.zeros((p.shape[0], k))
    for j in range(p.shape[1]):
        a[:, labels[j]] += p[:, j]
    return a


def reduced_rows(a, v, labels, k):
    """Stationary-weighted aggregate averages of the rows of ``a`` (unweighted if mass is zero)."""
    num = np.zeros((k, a.shape[1]))
    np.add.at(num, labels, v[:, None] * a)
    mass = np.bincount(labels, weights=v, minlength=k)
    plain = np.zeros((k, a.shape[1]))
    np.add.at(plain, labels, a)
    counts = np.bincount(labels, minlength=k)
    out = np.empty_like(num)
    for l in range(k):
        if mass[l] < MASS_TOL:
            out[l] = plain[l] / counts[l]
        else:
            out[l] = num[l] / mass[l]
    return out


def iterate_lumping(p, v, labels, k, max_iter):
    """Argmin reassignment of states to aggregates by their ``P Pi`` rows.

    Each pass computes the reduced rows for the current assignment and moves every state
    to the aggregate whose reduced row is nearest (ties to the lowest id). Returns
    ``(labels, n_iter, converged)``.
    """
    p = np.ascontiguousarray(p, dtype=float)
    v = np.ascontiguousarray(v, dtype=float)
    labels = np.array(labels, dtype=np.int64, copy=True)
    n = p.shape[0]
    for it in range(1, max_iter + 1):
        a = block_sums(p, labels, k)
        red = reduced_rows(a, v, labels, k)
        d = _sq_dist(a, red)
        new = np.argmin(d, axis=1).astype(np.int64)
        mind = d[np.arange(n), new]
        counts = np.bincount(new, minlength=k)
        _reseed_empty(new, counts, mind, k)
        if np.array_equal(new, labels):
            return labels, it, True
        labels = new
    return labels, max_iter, False
