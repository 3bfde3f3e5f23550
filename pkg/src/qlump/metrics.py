"""Quality measures for a found partition: mean waiting time and commutation residual."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._random import substream
from .errors import AbsorbingAggregate, DimensionMismatch
from .markov import (
    as_partition,
    as_transition_matrix,
    canonical_labels,
    commutation_residual,
    lump,
    stationary_distribution,
)

EXIT_TOL = 1e-12
EXACT_TOL = 1e-14


class Normalized(NamedTuple):
    """A ratio against the planted partition, or the raw value when the ratio is undefined."""

    value: float
    raw: bool = False


@dataclass(frozen=True)
class MetricReport:
    tau_raw: float
    tau_normalized: float
    delta_raw: float
    delta_normalized: float
    delta_is_raw: bool = False


def waiting_time(p, pi, v=None):
    """Mean number of steps per visit to an aggregate, ``1 / sum_k m_k (1 - P~_kk)``.

    ``m_k`` is the stationary mass of aggregate ``k`` and ``P~`` the stationary-weighted lumped
    chain. Raises :class:`AbsorbingAggregate` if some aggregate has no exits.
    """
    p = as_transition_matrix(p)
    pi = as_partition(pi)
    if pi.k < 2:
        raise ValueError("waiting time needs at least 2 aggregates")
    chain = lump(p, pi, v)
    exits = 1.0 - np.diag(chain.p_tilde)
    closed = np.flatnonzero(exits < EXIT_TOL)
    if closed.size:
        raise AbsorbingAggregate(int(closed[0]))
    return float(1.0 / np.dot(chain.aggregate_mass, exits))


def simulated_waiting_time(p, pi, steps=200_000, seed=0, burn_in=1000):
    """Monte Carlo estimate of :func:`waiting_time`: steps divided by aggregate switches.

    Cross-validation only; the analytic value is what the benchmark reports.
    """
    p = as_transition_matrix(p)
    pi = as_partition(pi)
    rng = substream(seed, 0)
    cdf = np.cumsum(p.entries, axis=1)
    cdf[:, -1] = 1.0
    draws = rng.random(steps + burn_in)
    state = int(rng.integers(p.n))
    jumps = 0
    labels = pi.labels
    for t in range(steps + burn_in):
        nxt = int(np.searchsorted(cdf[state], draws[t], side="right"))
        if t >= burn_in and labels[nxt] != labels[state]:
            jumps += 1
        state = nxt
    return float("inf") if jumps == 0 else steps / jumps


def normalized_tau(p, pi_found, pi_truth):
    """Waiting time of ``pi_found`` relative to the planted partition (1 = equally stable)."""
    p = as_transition_matrix(p)
    v = stationary_distribution(p)
    return waiting_time(p, pi_found, v) / waiting_time(p, pi_truth, v)


def normalized_delta(p, pi_found, pi_truth):
    """Residual of ``pi_found`` relative to the planted partition.

    When the planted partition is an exact lumping (residual below 1e-14) the ratio is
    undefined and the raw residual is returned with ``raw=True``.
    """
    p = as_transition_matrix(p)
    v = stationary_distribution(p)
    found = commutation_residual(p, pi_found, v)
    truth = commutation_residual(p, pi_truth, v)
    if truth < EXACT_TOL:
        return Normalized(found, True)
    return Normalized(found / truth, False)


def partitions_match(a, b):
    """True when ``a`` and ``b`` group the states identically, whatever the labels."""
    a, b = as_partition(a), as_partition(b)
    if a.n != b.n:
        raise DimensionMismatch(f"partitions have {a.n} and {b.n} states")
    return a.k == b.k and np.array_equal(canonical_labels(a.labels), canonical_labels(b.labels))


def report(p, pi_found, pi_truth):
    p = as_transition_matrix(p)
    v = stationary_distribution(p)
    tau_found = waiting_time(p, pi_found, v)
    delta = normalized_delta(p, pi_found, pi_truth)
    return MetricReport(
        tau_found,
        tau_found / waiting_time(p, pi_truth, v),
        commutation_residual(p, pi_found, v),
        delta.value,
        delta.raw,
    )
