"""Epsilon sweeps over planted instances, scoring every method against the planted partition."""
import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._random import derive_seed, substream
from .errors import AbsorbingAggregate, InvalidConfig, LumpingError
from .generators import CLASSES, make_instance
from .markov import stationary_distribution
from .methods import Method, detect, random_partition
from .metrics import normalized_delta, waiting_time

CSV_HEADER = [
    "class", "epsilon", "delta", "trial", "method", "n", "m", "seed",
    "tau_norm", "tau_flag", "delta_norm", "delta_flag", "wall_ms",
]
RANDOM = "random"
ALIASES = {"q": None, "q-metastable": Method.Q_METASTABLE, "q-general": Method.Q_GENERAL,
           "p-eigs": Method.P_EIGS, "svd": Method.SVD, "froyland": Method.FROYLAND,
           "iter-cluster": Method.ITER_CLUSTER, RANDOM: RANDOM}


def parse_grid(text):
    """``start:stop:step`` (inclusive) or a comma-separated list of values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad grid {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(x) for x in text.split(",") if x.strip()]


def resolve_method(name, cls):
    """Map a CLI method name to a :class:`Method` (``q`` picks the variant suited to ``cls``)."""
    if name not in ALIASES:
        raise ValueError(f"unknown method {name!r}; choose from {sorted(ALIASES)}")
    if name == "q":
        return Method.Q_GENERAL if cls == "blockstoch" else Method.Q_METASTABLE
    return ALIASES[name]


def method_label(method):
    return method if method == RANDOM else method.value


@dataclass(frozen=True)
class SweepConfig:
    generator_class: str
    epsilon_grid: tuple
    n: int = 200
    trials: int = 20
    methods: tuple = ("q", "p-eigs", "svd", "froyland", "iter-cluster")
    delta: float = None
    master_seed: int = 0
    k_policy: object = "truth"
    m: int = None

    def __post_init__(self):
        if self.generator_class not in CLASSES:
            raise InvalidConfig(f"unknown class {self.generator_class!r}")
        grid = tuple(float(e) for e in self.epsilon_grid)
        if not grid or list(grid) != sorted(grid):
            raise InvalidConfig("epsilon grid must be non-empty and ascending")
        if any(not 0.0 <= e <= 1.0 for e in grid):
            raise InvalidConfig("epsilon values must lie in [0, 1]")
        if self.trials < 1:
            raise InvalidConfig("trials must be at least 1")
        if self.generator_class == "sparse":
            if self.delta is None:
                raise InvalidConfig("sparse class needs delta")
            if grid[-1] > self.delta:
                raise InvalidConfig("sparse class needs delta >= epsilon")
        object.__setattr__(self, "epsilon_grid", grid)
        object.__setattr__(self, "methods", tuple(self.methods))
        for name in self.methods:
            resolve_method(name, self.generator_class)


@dataclass(frozen=True)
class ExperimentRecord:
    cls: str
    epsilon: float
    delta: float
    trial: int
    method: str
    n: int
    m: int
    seed: int
    tau_norm: float
    tau_flag: str
    delta_norm: float
    delta_flag: str
    wall_ms: float = None

    def row(self):
        def num(x):
            return "" if x is None or not math.isfinite(x) else repr(float(x))

        return [
            self.cls, repr(self.epsilon), "" if self.delta is None else repr(self.delta),
            self.trial, self.method, self.n, self.m, self.seed,
            num(self.tau_norm), self.tau_flag, num(self.delta_norm), self.delta_flag,
            "" if self.wall_ms is None else f"{self.wall_ms:.3f}",
        ]


def trial_seed(master_seed, eps_index, trial):
    return derive_seed(master_seed, eps_index, trial)


def _score(p, found, truth, v):
    try:
        tau = waiting_time(p, found, v) / waiting_time(p, truth, v)
        tau_flag = ""
    except AbsorbingAggregate:
        tau, tau_flag = math.nan, "absorbing"
    except LumpingError as exc:
        tau, tau_flag = math.nan, f"error:{type(exc).__name__}"
    try:
        d = normalized_delta(p, found, truth)
        delta, delta_flag = d.value, ("raw" if d.raw else "")
    except LumpingError as exc:
        delta, delta_flag = math.nan, f"error:{type(exc).__name__}"
    return tau, tau_flag, delta, delta_flag


def run_trial(config, eps_index, trial, timing=False):
    """All selected methods on one planted instance; never raises for per-method failures."""
    eps = config.epsilon_grid[eps_index]
    seed = trial_seed(config.master_seed, eps_index, trial)
    cls = config.generator_class
    try:
        inst = make_instance(cls, config.n, eps, seed, m=config.m, delta=config.delta)
        v = stationary_distribution(inst.matrix)
    except LumpingError as exc:
        flag = f"error:{type(exc).__name__}"
        return [
            ExperimentRecord(cls, eps, config.delta, trial, method_label(resolve_method(name, cls)),
                             config.n, config.m or 0, seed, math.nan, flag, math.nan, flag)
            for name in config.methods
        ]
    k = inst.config.m if config.k_policy == "truth" else int(config.k_policy)
    out = []
    for name in config.methods:
        method = resolve_method(name, cls)
        start = time.perf_counter()
        try:
            if method == RANDOM:
                found = random_partition(inst.matrix.n, k, substream(seed, 99))
            else:
                found = detect(method, inst.matrix, k, seed=seed).partition
            scores = _score(inst.matrix, found, inst.truth, v)
        except (LumpingError, ValueError) as exc:
            flag = f"error:{type(exc).__name__}"
            scores = (math.nan, flag, math.nan, flag)
        wall = (time.perf_counter() - start) * 1e3 if timing else None
        out.append(ExperimentRecord(cls, eps, config.delta, trial, method_label(method),
                                    config.n, inst.config.m, seed, *scores, wall))
    return out


def _run_task(args):
    return run_trial(*args)


def run_sweep(config, jobs=1, timing=False, progress=None):
    """Every (epsilon, trial) of ``config``; records sorted by (epsilon, trial, method)."""
    tasks = [(config, e, t, timing) for e in range(len(config.epsilon_grid)) for t in range(config.trials)]
    records = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_run_task, tasks):
                records.extend(chunk)
                if progress:
                    progress()
    else:
        for task in tasks:
            records.extend(_run_task(task))
            if progress:
                progress()
    records.sort(key=lambda r: (r.epsilon, r.trial, r.method))
    return records


def write_records(records, path, config=None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.row())


def read_records(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def summarize(records, field="tau_norm"):
    """``{(epsilon, method): (mean, standard error, count)}`` over unflagged values of ``field``."""
    flag_field = "tau_flag" if field == "tau_norm" else "delta_flag"
    groups = {}
    for rec in records:
        value = getattr(rec, field)
        if getattr(rec, flag_field) not in ("",) or not math.isfinite(value):
            continue
        groups.setdefault((rec.epsilon, rec.method), []).append(value)
    out = {}
    for key, values in sorted(groups.items()):
        arr = np.asarray(values)
        se = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
        out[key] = (float(arr.mean()), se, int(arr.size))
    return out


def format_summary(records):
    lines = ["epsilon,method,metric,mean,stderr,count"]
    for field in ("tau_norm", "delta_norm"):
        for (eps, method), (mean, se, count) in summarize(records, field).items():
            lines.append(f"{eps!r},{method},{field},{mean:.6g},{se:.3g},{count}")
    return "\n".join(lines)
