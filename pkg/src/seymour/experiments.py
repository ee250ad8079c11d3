"""Monte Carlo and exhaustive experiments on Seymour-vertex counts.

Trial ``t`` of a run always uses ``rng_stream(master_seed, t)``.  Trials are
split into contiguous chunks, optionally farmed out to worker processes, and
collected back in trial order, so every statistic is identical for any worker
count.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels as K
from .models import HALF, _fill, parse_probability, rng_stream

log = logging.getLogger(__name__)

DEFAULT_SEED = 20240601
WORKERS_ENV = "SEYMOUR_WORKERS"

CSV_COLUMNS = ("n", "p", "trials", "mean_s", "var_s", "frac_all_seymour", "frac_deviating", "seed")

MAX_EXHAUSTIVE_TOURNAMENT = 7
MAX_EXHAUSTIVE_DIGRAPH = 5


class ExperimentAborted(RuntimeError):
    """A run failed part-way; no partial statistics are returned."""


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            w = int(env)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if w < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1, got {w}")
        return w
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "tournament"
    n: int | tuple[int, ...] = 10
    p: Fraction | None = None
    trials: int = 1000
    master_seed: int = DEFAULT_SEED
    deviation_epsilon: float | None = None
    deviation_A: float | None = None
    workers: int | None = None
    force_bfs: bool = False

    def __post_init__(self):
        if self.model not in ("tournament", "digraph"):
            raise ValueError(f"model must be 'tournament' or 'digraph', got {self.model!r}")
        if isinstance(self.n, (int, np.integer)):
            object.__setattr__(self, "n", int(self.n))
        else:
            object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError(f"every n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.model == "digraph":
            if self.p is None:
                raise ValueError("the digraph model needs p")
            p = parse_probability(self.p)
            if not 0 <= p <= HALF:
                raise ValueError(f"p must lie in [0, 1/2], got {p}")
            object.__setattr__(self, "p", p)
        elif self.p is not None:
            raise ValueError("p is not used by the tournament model")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.deviation_A is not None and not self.deviation_A > 0:
            raise ValueError("deviation_A must be positive")
        if self.deviation_epsilon is not None and not self.deviation_epsilon > 0:
            raise ValueError("deviation_epsilon must be positive")
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.n,) if isinstance(self.n, int) else self.n

    def single_n(self) -> int:
        if len(self.sizes) != 1:
            raise ValueError(f"expected a single n, got {self.sizes}")
        return self.sizes[0]


def threshold_sqrt_nlogn(n: int, A: float) -> float:
    return A * math.sqrt(n * math.log(n))


def threshold_power(n: int, epsilon: float) -> float:
    return n ** (0.5 + epsilon)


def deviation_fraction(s_values: np.ndarray, center: float, threshold: float, strict: bool = False) -> float:
    dev = np.abs(np.asarray(s_values, dtype=np.float64) - center)
    hits = dev > threshold if strict else dev >= threshold
    return float(np.count_nonzero(hits)) / len(dev)


@dataclass(frozen=True)
class TrialStats:
    n: int
    p: Fraction | None
    trials: int
    seed: int
    mean_s: float
    var_s: float
    histogram: dict[int, int]
    frac_all_seymour: float
    frac_deviating: float
    mean_ratio_min: float
    frac_fast_path: float
    s_values: np.ndarray = field(repr=False, compare=False)

    def csv_row(self) -> list[str]:
        return [
            str(self.n),
            "" if self.p is None else str(self.p),
            str(self.trials),
            _fmt(self.mean_s),
            _fmt(self.var_s),
            _fmt(self.frac_all_seymour),
            _fmt(self.frac_deviating),
            str(self.seed),
        ]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": None if self.p is None else str(self.p),
            "trials": self.trials,
            "seed": self.seed,
            "mean_s": _jnum(self.mean_s),
            "var_s": _jnum(self.var_s),
            "frac_all_seymour": _jnum(self.frac_all_seymour),
            "frac_deviating": _jnum(self.frac_deviating),
            "mean_ratio_min": _jnum(self.mean_ratio_min),
            "frac_fast_path": _jnum(self.frac_fast_path),
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def _jnum(x: float):
    return None if math.isnan(x) else float(x)


def _moments(s: np.ndarray) -> tuple[float, float]:
    # integer sums keep mean/variance exact up to the final rounding
    t = len(s)
    s1 = int(s.sum())
    s2 = int((s.astype(np.int64) ** 2).sum())
    mean = Fraction(s1, t)
    var = (Fraction(s2) - s1 * mean) / (t - 1) if t > 1 else Fraction(0)
    return float(mean), float(var)


def _run_chunk(model, n, p, seed, start, stop, force_bfs):
    count = stop - start
    s = np.empty(count, dtype=np.int64)
    ratio = np.empty(count, dtype=np.float64)
    fast = np.zeros(count, dtype=np.bool_)
    for i, t in enumerate(range(start, stop)):
        rng = rng_stream(seed, t)
        if model == "tournament":
            rows = _fill(n, HALF, rng)
            s[i], ratio[i], fast[i] = K.summarize_tournament(rows, n, force_bfs)
        else:
            rows = _fill(n, p, rng)
            s[i], ratio[i] = K.summarize_full(rows, n)
    return s, ratio, fast


def _chunks(trials, workers):
    if workers <= 1:
        return [(0, trials)]
    size = max(1, math.ceil(trials / (4 * workers)))
    return [(a, min(a + size, trials)) for a in range(0, trials, size)]


def _pool_context():
    methods = multiprocessing.get_all_start_methods()
    return multiprocessing.get_context("fork" if "fork" in methods else None)


def _run_trials(model, n, p, seed, trials, workers, force_bfs):
    workers = default_workers() if workers is None else workers
    chunks = _chunks(trials, workers)
    try:
        if workers <= 1 or len(chunks) == 1:
            parts = [_run_chunk(model, n, p, seed, a, b, force_bfs) for a, b in chunks]
        else:
            with ProcessPoolExecutor(max_workers=workers, mp_context=_pool_context()) as ex:
                futures = [ex.submit(_run_chunk, model, n, p, seed, a, b, force_bfs) for a, b in chunks]
                parts = [f.result() for f in futures]
    except (MemoryError, BrokenProcessPool) as exc:
        raise ExperimentAborted(f"{model} run n={n} aborted: {exc!r}") from exc
    return tuple(np.concatenate(cols) for cols in zip(*parts))


def _build_stats(cfg: ExperimentConfig, n, s, ratio, fast) -> TrialStats:
    mean, var = _moments(s)
    values, counts = np.unique(s, return_counts=True)
    if cfg.deviation_A is not None:
        frac_dev = deviation_fraction(s, mean, threshold_sqrt_nlogn(n, cfg.deviation_A))
    elif cfg.deviation_epsilon is not None:
        frac_dev = deviation_fraction(s, mean, threshold_power(n, cfg.deviation_epsilon), strict=True)
    else:
        frac_dev = math.nan
    finite = ratio[~np.isnan(ratio)]
    return TrialStats(
        n=n,
        p=cfg.p,
        trials=len(s),
        seed=cfg.master_seed,
        mean_s=mean,
        var_s=var,
        histogram={int(v): int(c) for v, c in zip(values, counts)},
        frac_all_seymour=float(np.count_nonzero(s == n)) / len(s),
        frac_deviating=frac_dev,
        mean_ratio_min=float(finite.sum() / len(finite)) if len(finite) else math.nan,
        frac_fast_path=float(np.count_nonzero(fast)) / len(s),
        s_values=s,
    )


def run_tournament_trials(cfg: ExperimentConfig) -> TrialStats:
    """|S| over ``cfg.trials`` random tournaments on ``cfg.n`` vertices.

    Each trial uses the degree criterion when the tournament has diameter at
    most 2 and a full N2 pass otherwise (always, with ``force_bfs``).
    """
    if cfg.model != "tournament":
        raise ValueError("config model must be 'tournament'")
    n = cfg.single_n()
    log.debug("tournament trials n=%d trials=%d seed=%d", n, cfg.trials, cfg.master_seed)
    s, ratio, fast = _run_trials("tournament", n, None, cfg.master_seed, cfg.trials, cfg.workers, cfg.force_bfs)
    return _build_stats(cfg, n, s, ratio, fast)


def run_digraph_trials(cfg: ExperimentConfig) -> TrialStats:
    if cfg.model != "digraph":
        raise ValueError("config model must be 'digraph'")
    n = cfg.single_n()
    log.debug("digraph trials n=%d p=%s trials=%d seed=%d", n, cfg.p, cfg.trials, cfg.master_seed)
    s, ratio, fast = _run_trials("digraph", n, cfg.p, cfg.master_seed, cfg.trials, cfg.workers, False)
    return _build_stats(cfg, n, s, ratio, fast)


def run_trials(cfg: ExperimentConfig) -> TrialStats:
    if cfg.model == "tournament":
        return run_tournament_trials(cfg)
    return run_digraph_trials(cfg)


@dataclass(frozen=True)
class DeviationRow:
    n: int
    trials: int
    seed: int
    mean_s: float
    var_s: float
    A: float | None
    threshold_A: float
    frac_A: float
    chebyshev_A: float
    epsilon: float | None
    threshold_eps: float
    frac_eps: float


def deviation_experiment(cfg: ExperimentConfig) -> list[DeviationRow]:
    """Fraction of trials with |S| far from the sample mean, for each n.

    Two thresholds: ``A sqrt(n ln n)`` (counted with >=) and
    ``n^(1/2 + eps)`` (counted with >).  ``chebyshev_A`` is the bound
    Var/threshold^2 using the measured variance.
    """
    if cfg.deviation_A is None and cfg.deviation_epsilon is None:
        raise ValueError("deviation experiment needs deviation_A or deviation_epsilon")
    if cfg.trials < 1000:
        raise ValueError(f"deviation experiment needs >= 1000 trials, got {cfg.trials}")
    rows = []
    for n in cfg.sizes:
        sub = ExperimentConfig(
            model=cfg.model, n=n, p=cfg.p, trials=cfg.trials, master_seed=cfg.master_seed, workers=cfg.workers
        )
        st = run_trials(sub)
        if cfg.deviation_A is not None:
            thr_a = threshold_sqrt_nlogn(n, cfg.deviation_A)
            frac_a = deviation_fraction(st.s_values, st.mean_s, thr_a)
            cheb = st.var_s / thr_a**2 if thr_a > 0 else math.inf
        else:
            thr_a = frac_a = cheb = math.nan
        if cfg.deviation_epsilon is not None:
            thr_e = threshold_power(n, cfg.deviation_epsilon)
            frac_e = deviation_fraction(st.s_values, st.mean_s, thr_e, strict=True)
        else:
            thr_e = frac_e = math.nan
        rows.append(
            DeviationRow(n, st.trials, cfg.master_seed, st.mean_s, st.var_s, cfg.deviation_A, thr_a, frac_a, cheb,
                         cfg.deviation_epsilon, thr_e, frac_e)
        )
    return rows


def variance_constant_estimate(n: int, trials: int, seed: int = DEFAULT_SEED, workers: int | None = None) -> float:
    """Sample Var|S| / n over random tournaments."""
    if trials < 1000:
        raise ValueError(f"need >= 1000 trials, got {trials}")
    st = run_tournament_trials(ExperimentConfig("tournament", n, trials=trials, master_seed=seed, workers=workers))
    return st.var_s / n


@dataclass(frozen=True)
class EvolutionRecord:
    n: int
    mean_s: float
    var_s: float
    mean_borderline_seymour: float
    mean_borderline_non_seymour: float
    frac_diameter2: float
    mean_gained: float
    mean_lost: float
    max_lost: int


@dataclass(frozen=True)
class EvolutionTrace:
    n_start: int
    n_end: int
    trials: int
    seed: int
    records: list[EvolutionRecord]
    audits_failed: int

    @property
    def steps(self) -> int:
        return self.n_end - self.n_start


def evolve_experiment(n_start: int, n_end: int, trials: int, seed: int = DEFAULT_SEED,
                      audit_every: int = 16) -> EvolutionTrace:
    """Grow random tournaments vertex by vertex and track |S| at each size.

    Borderline Seymour vertices have indeg - outdeg in {0, 1}; borderline
    non-Seymour ones have outdeg - indeg in {1, 2} (which member occurs is
    fixed by the parity of n).  ``mean_gained``/``mean_lost`` count old
    vertices whose Seymour status flipped when the newest vertex joined.
    Every ``audit_every`` sizes the degree criterion is re-checked against a
    full N2 pass; any disagreement raises.
    """
    if not 1 <= n_start < n_end:
        raise ValueError(f"need 1 <= n_start < n_end, got {n_start}, {n_end}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    steps = n_end - n_start + 1
    s_all = np.zeros((trials, steps), dtype=np.int64)
    bs = np.zeros((trials, steps), dtype=np.int64)
    bns = np.zeros((trials, steps), dtype=np.int64)
    d2 = np.zeros((trials, steps), dtype=np.bool_)
    gained = np.zeros((trials, steps), dtype=np.int64)
    lost = np.zeros((trials, steps), dtype=np.int64)
    total_pairs = n_end * (n_end - 1) // 2
    bad = 0
    for t in range(trials):
        rng = rng_stream(seed, t)
        rows = np.zeros((n_end, K.n_words(n_end)), dtype=np.uint64)
        out = K.evolve_tournament(rows, rng.random(total_pairs), n_start, n_end, audit_every)
        s_all[t], bs[t], bns[t], d2[t], gained[t], lost[t] = out[:6]
        bad += out[6]
    if bad:
        raise ExperimentAborted(f"degree criterion disagreed with the full N2 pass on {bad} vertices")
    records = []
    for k in range(steps):
        mean, var = _moments(s_all[:, k])
        records.append(
            EvolutionRecord(
                n=n_start + k,
                mean_s=mean,
                var_s=var,
                mean_borderline_seymour=float(bs[:, k].mean()),
                mean_borderline_non_seymour=float(bns[:, k].mean()),
                frac_diameter2=float(d2[:, k].mean()),
                mean_gained=float(gained[:, k].mean()) if k else math.nan,
                mean_lost=float(lost[:, k].mean()) if k else math.nan,
                max_lost=int(lost[:, k].max()) if k else 0,
            )
        )
    return EvolutionTrace(n_start, n_end, trials, seed, records, bad)


@dataclass(frozen=True)
class ExactSummary:
    kind: str
    n: int
    total_graphs: int
    exact_e_s: Fraction
    exact_var_s: Fraction
    min_s: int
    histogram: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "total_graphs": self.total_graphs,
            "exact_e_s": str(self.exact_e_s),
            "exact_e_s_float": float(self.exact_e_s),
            "exact_var_s": str(self.exact_var_s),
            "exact_var_s_float": float(self.exact_var_s),
            "min_s": self.min_s,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def summary_from_histogram(kind: str, n: int, hist: dict[int, int]) -> ExactSummary:
    total = sum(hist.values())
    e = Fraction(sum(k * c for k, c in hist.items()), total)
    e2 = Fraction(sum(k * k * c for k, c in hist.items()), total)
    return ExactSummary(kind, n, total, e, e2 - e * e, min(hist), dict(sorted(hist.items())))


def _pairs(n):
    pi, pj = zip(*itertools.combinations(range(n), 2)) if n > 1 else ((), ())
    return np.array(pi, dtype=np.int64), np.array(pj, dtype=np.int64)


def exhaustive_tournaments(n: int, allow_large: bool = False) -> ExactSummary:
    """Exact |S| distribution over all 2^(n(n-1)/2) labelled tournaments."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > MAX_EXHAUSTIVE_TOURNAMENT and not allow_large:
        raise ValueError(f"n={n} exceeds {MAX_EXHAUSTIVE_TOURNAMENT}; pass allow_large to override")
    if n * (n - 1) // 2 > 40:
        raise ValueError(f"n={n} is beyond any feasible enumeration")
    hist = K.enumerate_tournaments(n, *_pairs(n))
    return summary_from_histogram("tournament", n, {k: int(c) for k, c in enumerate(hist) if c})


def exhaustive_digraphs(n: int, allow_large: bool = False) -> ExactSummary:
    """Exact |S| distribution over all 3^(n(n-1)/2) digraphs without 2-cycles."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > MAX_EXHAUSTIVE_DIGRAPH and not allow_large:
        raise ValueError(f"n={n} exceeds {MAX_EXHAUSTIVE_DIGRAPH}; pass allow_large to override")
    if n * (n - 1) // 2 > 25:
        raise ValueError(f"n={n} is beyond any feasible enumeration")
    hist = K.enumerate_oriented(n, *_pairs(n))
    return summary_from_histogram("digraph", n, {k: int(c) for k, c in enumerate(hist) if c})


# ---------------------------------------------------------------- output


def stats_csv(stats: Sequence[TrialStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for st in stats:
        w.writerow(st.csv_row())
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


DEVIATION_COLUMNS = ("n", "trials", "mean_s", "var_s", "A", "threshold_A", "frac_A", "chebyshev_A",
                     "epsilon", "threshold_eps", "frac_eps", "seed")


def deviation_csv(rows: Sequence[DeviationRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DEVIATION_COLUMNS)
    for r in rows:
        w.writerow([r.n, r.trials, _fmt(r.mean_s), _fmt(r.var_s), "" if r.A is None else repr(r.A),
                    _fmt(r.threshold_A), _fmt(r.frac_A), _fmt(r.chebyshev_A),
                    "" if r.epsilon is None else repr(r.epsilon), _fmt(r.threshold_eps), _fmt(r.frac_eps), r.seed])
    return buf.getvalue()


def deviation_dicts(rows: Sequence[DeviationRow]) -> list[dict]:
    return [{k: (_jnum(v) if isinstance(v, float) else v) for k, v in r.__dict__.items()} for r in rows]


EVOLUTION_COLUMNS = ("n", "mean_s", "var_s", "mean_borderline_seymour", "mean_borderline_non_seymour",
                     "frac_diameter2", "mean_gained", "mean_lost", "max_lost")


def evolution_csv(trace: EvolutionTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EVOLUTION_COLUMNS)
    for r in trace.records:
        w.writerow([r.n, _fmt(r.mean_s), _fmt(r.var_s), _fmt(r.mean_borderline_seymour),
                    _fmt(r.mean_borderline_non_seymour), _fmt(r.frac_diameter2), _fmt(r.mean_gained),
                    _fmt(r.mean_lost), r.max_lost])
    return buf.getvalue()


def evolution_dict(trace: EvolutionTrace) -> dict:
    return {
        "n_start": trace.n_start,
        "n_end": trace.n_end,
        "trials": trace.trials,
        "seed": trace.seed,
        "records": [{k: (_jnum(v) if isinstance(v, float) else v) for k, v in r.__dict__.items()}
                    for r in trace.records],
    }
