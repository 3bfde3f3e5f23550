"""The invariance matrix ``Q(lam) = (P - lam I)^H (P - lam I)`` and its eigendecomposition.

For a unit vector ``u``, ``u^H Q(lam) u = ||(P - lam I) u||^2``, so eigenvectors of ``Q`` with
small eigenvalues are the vectors closest to being right-invariant under ``P`` with factor ``lam``.
``Q`` is self-adjoint for any ``P``, which keeps the eigenproblem well conditioned even when
``P`` is far from reversible.
"""
from dataclasses import dataclass

import numpy as np

from .errors import EigenFailure
from .markov import as_transition_matrix

GAUGE_TOL = 1e-10
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SpectralShift:
    value: complex

    def __post_init__(self):
        value = complex(self.value)
        if not (np.isfinite(value.real) and np.isfinite(value.imag)):
            raise ValueError(f"shift must be finite, got {value}")
        object.__setattr__(self, "value", value)

    @property
    def is_real(self):
        return self.value.imag == 0.0

    def __complex__(self):
        return self.value


def as_shift(shift):
    return shift if isinstance(shift, SpectralShift) else SpectralShift(shift)


@dataclass(frozen=True, eq=False)
class InvarianceMatrix:
    q: np.ndarray
    shift: SpectralShift
    source_dim: int


@dataclass(frozen=True, eq=False)
class EigenBasis:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def build_invariance_matrix(p, shift):
    """Assemble ``Q = P^H P - conj(lam) P - lam P^H + |lam|^2 I`` and symmetrize it."""
    p = as_transition_matrix(p)
    shift = as_shift(shift)
    a = p.entries
    lam = shift.value
    gram = a.T @ a
    if shift.is_real:
        lam = lam.real
        q = gram - lam * (a + a.T)
    else:
        q = gram - np.conj(lam) * a - lam * a.T
    q[np.diag_indices_from(q)] += abs(lam) ** 2
    q = 0.5 * (q + q.conj().T)
    q.setflags(write=False)
    return InvarianceMatrix(q, shift, p.n)


def fix_gauge(vectors):
    """Scale each column by a unit-modulus factor so its first non-negligible entry is real positive."""
    v = np.array(vectors, copy=True)
    if v.ndim == 1:
        return fix_gauge(v[:, None])[:, 0]
    for c in range(v.shape[1]):
        col = v[:, c]
        scale = np.max(np.abs(col))
        if scale == 0.0:
            continue
        lead = col[np.flatnonzero(np.abs(col) > GAUGE_TOL * scale)[0]]
        if np.iscomplexobj(v):
            v[:, c] = col * (abs(lead) / lead)
        elif lead < 0:
            v[:, c] = -col
    return v


def _lex_key(vec):
    # descending lexicographic order on (re, im) of successive components
    if np.iscomplexobj(vec):
        pairs = np.stack([vec.real, vec.imag], axis=1).ravel()
    else:
        pairs = vec
    return tuple(-pairs)


def self_adjoint_eigs(q):
    """Ascending eigendecomposition of a self-adjoint matrix with a fixed gauge.

    Columns are gauge fixed by :func:`fix_gauge`; within groups of numerically equal
    eigenvalues the columns are ordered by descending lexicographic comparison.
    """
    mat = q.q if isinstance(q, InvarianceMatrix) else np.asarray(q)
    try:
        values, vectors = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    if not np.all(np.isfinite(values)):
        raise EigenFailure("non-finite eigenvalues")
    vectors = fix_gauge(vectors)
    order = list(range(values.size))
    start = 0
    while start < values.size:
        stop = start + 1
        while stop < values.size and values[stop] - values[start] <= TIE_TOL * max(1.0, abs(values[start])):
            stop += 1
        if stop - start > 1:
            order[start:stop] = sorted(range(start, stop), key=lambda c: _lex_key(vectors[:, c]))
        start = stop
    return EigenBasis(values, vectors[:, order])


def smallest_eigenpairs(q, k):
    """The ``k`` smallest eigenvalues of ``q`` and their gauge-fixed eigenvectors (n x k)."""
    n = q.source_dim if isinstance(q, InvarianceMatrix) else np.asarray(q).shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    basis = self_adjoint_eigs(q)
    return basis.eigenvalues[:k], basis.eigenvectors[:, :k]
