"""Seeded Monte Carlo experiments over the two random models.

Every trial is a pure function of ``(params, seed_plan, trial_index)``, so
results are merged by trial index and never depend on the worker count.
"""

import csv
import dataclasses
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from statistics import NormalDist
from typing import NamedTuple, Optional

import numpy as np

from . import engine, theory
from .engine import ColorSet
from .exceptions import DomainError, RainbowError
from .graphs import Model, ModelParams, SeedPlan, derive_params, sample, sample_family, union_graph
from .validation import check_int, check_s_range

logger = logging.getLogger(__name__)

Z95 = NormalDist().inv_cdf(0.975)
SUCCESS_LEVEL = 0.5

CSV_COLUMNS = (
    "trial_index",
    "n",
    "s",
    "c",
    "model",
    "rainbow_connected",
    "union_connected",
    "union_diameter",
    "max_layer_degree",
    "witness_u",
    "witness_v",
    "elapsed_ms",
)
CURVE_COLUMNS = (
    "n",
    "c",
    "model",
    "s",
    "trials",
    "successes",
    "fraction",
    "wilson_low",
    "wilson_high",
    "s_star",
)


class ResultsIOError(RainbowError, OSError):
    """Reading or writing a results file failed."""


@dataclasses.dataclass(frozen=True)
class TrialRecord:
    """One sampled graph and everything measured on it.

    ``union_diameter`` is ``None`` when the union graph is disconnected;
    ``max_layer_degree`` is ``None`` for the uniform model.
    """

    trial_index: int
    n: int
    s: int
    c: float
    model: Model
    rainbow_connected: bool
    witness_pair: Optional[tuple]
    union_connected: bool
    union_diameter: Optional[int]
    max_layer_degree: Optional[int]
    elapsed: float = dataclasses.field(default=0.0, compare=False)

    def is_consistent(self):
        if not self.rainbow_connected:
            return True
        return self.union_connected and self.union_diameter is not None and self.union_diameter <= self.s


def run_trial(params, seed_plan, trial_index):
    """Sample one graph and evaluate rainbow and union connectivity on it."""
    start = time.perf_counter()
    graph = sample(params, seed_plan, trial_index)
    verdict = engine.is_rainbow_connected(graph)
    union = union_graph(graph)
    diameter = engine.bfs_diameter(union)
    degree = engine.max_layer_degree(graph) if params.model is Model.FAMILY else None
    return TrialRecord(
        trial_index=int(trial_index),
        n=params.n,
        s=params.s,
        c=params.c,
        model=params.model,
        rainbow_connected=verdict.connected,
        witness_pair=verdict.witness,
        union_connected=diameter is not None,
        union_diameter=diameter,
        max_layer_degree=degree,
        elapsed=time.perf_counter() - start,
    )


def run_trials(params, seed_plan, trials, workers=1):
    """Run trials ``0..trials-1``; the returned list is ordered by trial index."""
    indices = range(check_int(trials, "trials", min_value=1))
    workers = check_int(workers, "workers", min_value=1)
    if workers == 1:
        return [run_trial(params, seed_plan, i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: run_trial(params, seed_plan, i), indices))


def wilson_interval(successes, trials, z=Z95):
    """Wilson score interval for a binomial proportion.

    >>> lo, hi = wilson_interval(0, 10)
    >>> (lo, round(hi, 4))
    (0.0, 0.2775)
    """
    trials = check_int(trials, "trials", min_value=1)
    successes = check_int(successes, "successes", min_value=0, max_value=trials)
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    # clamp rounding noise so the interval always contains phat and stays in [0, 1]
    return max(0.0, min(center - half, phat)), min(1.0, max(center + half, phat))


def _params(n, s, c, model, p):
    # an explicit p bypasses the coupling p = c ln n / (s n)
    if p is None:
        return derive_params(n, s, c, model)
    return ModelParams(n=n, s=s, c=float(c), p=float(p), model=Model(model))


def estimate_probability(n, s, c, model=Model.FAMILY, trials=100, master_seed=0, *, p=None, workers=1):
    """Fraction of rainbow-connected samples, with its Wilson 95% interval."""
    params = _params(n, s, c, model, p)
    records = run_trials(params, SeedPlan(master_seed).child(s), trials, workers)
    k = sum(r.rainbow_connected for r in records)
    return k / len(records), wilson_interval(k, len(records))


@dataclasses.dataclass(frozen=True)
class CurvePoint:
    s: int
    trials: int
    successes: int
    interval: tuple

    @property
    def fraction(self):
        return self.successes / self.trials


@dataclasses.dataclass(frozen=True)
class ThresholdEstimate:
    """Empirical success curve over ``s`` and its median crossing ``s_star``.

    ``records`` keeps the per-trial data behind the curve; it is not part of
    equality or of the JSON form.
    """

    n: int
    c: float
    model: Model
    curve: dict
    s_star: Optional[int]
    records: tuple = dataclasses.field(default=(), compare=False, repr=False)

    def to_dict(self):
        return {
            "n": self.n,
            "c": self.c,
            "model": Model(self.model).value,
            "s_star": self.s_star,
            "curve": [
                {
                    "s": pt.s,
                    "trials": pt.trials,
                    "successes": pt.successes,
                    "fraction": pt.fraction,
                    "wilson_low": pt.interval[0],
                    "wilson_high": pt.interval[1],
                }
                for pt in self.curve.values()
            ],
        }

    @classmethod
    def from_dict(cls, data):
        curve = {
            int(row["s"]): CurvePoint(
                s=int(row["s"]),
                trials=int(row["trials"]),
                successes=int(row["successes"]),
                interval=(float(row["wilson_low"]), float(row["wilson_high"])),
            )
            for row in data["curve"]
        }
        return cls(
            n=int(data["n"]),
            c=float(data["c"]),
            model=Model(data["model"]),
            curve=curve,
            s_star=None if data["s_star"] is None else int(data["s_star"]),
        )


def _s_star(curve):
    for s, pt in sorted(curve.items()):
        if pt.fraction >= SUCCESS_LEVEL:
            return s
    return None


def scan_threshold(
    n, c, model=Model.FAMILY, trials_per_s=50, master_seed=0, s_range=None, *, p=None, workers=1
):
    """Estimate the success curve at every ``s`` in the range, in ascending order.

    Every ``s`` is visited; success need not be monotone in ``s`` because the
    family model's edge probability shrinks as ``s`` grows. ``s_range``
    defaults to :func:`theory.sweep_hint`. Trials at ``s`` draw from the
    substream ``(master_seed, s)``, so both models see paired seeds.
    """
    model = Model(model)
    if s_range is None:
        lo, hi = theory.sweep_hint(n)
        s_range = range(lo, hi + 1)
    values = check_s_range(s_range)
    trials_per_s = check_int(trials_per_s, "trials_per_s", min_value=1)
    root = SeedPlan(master_seed)
    curve = {}
    records = []
    for s in values:
        params = _params(n, s, c, model, p)
        batch = run_trials(params, root.child(s), trials_per_s, workers)
        k = sum(r.rainbow_connected for r in batch)
        curve[s] = CurvePoint(s, trials_per_s, k, wilson_interval(k, trials_per_s))
        records.extend(batch)
        logger.debug("n=%d c=%g %s s=%d: %d/%d", n, c, model.value, s, k, trials_per_s)
    return ThresholdEstimate(
        n=n, c=float(c), model=model, curve=curve, s_star=_s_star(curve), records=tuple(records)
    )


class ModelComparison(NamedTuple):
    family: ThresholdEstimate
    uniform: ThresholdEstimate

    @property
    def gap(self):
        if self.family.s_star is None or self.uniform.s_star is None:
            return None
        return abs(self.family.s_star - self.uniform.s_star)


def compare_models(n, c, trials_per_s=50, master_seed=0, s_range=None, *, p=None, workers=1):
    """Threshold scans of both models with paired seeds.

    A gap of more than one between the two ``s_star`` values is logged as a
    warning, not raised: the models are only expected to agree asymptotically.
    """
    fam = scan_threshold(n, c, Model.FAMILY, trials_per_s, master_seed, s_range, p=p, workers=workers)
    uni = scan_threshold(n, c, Model.UNIFORM, trials_per_s, master_seed, s_range, p=p, workers=workers)
    result = ModelComparison(fam, uni)
    if result.gap is not None and result.gap > 1:
        logger.warning(
            "s_star differs by %d between models (family %d, uniform %d) at n=%d, c=%g",
            result.gap, fam.s_star, uni.s_star, n, c,
        )
    return result


def check_degree_lemma(n, c, trials, master_seed=0, *, p=None):
    """Fraction of family samples whose every layer has max degree below ``2c ln n / ln ln n``.

    Uses ``s = s0(n, c)``.
    """
    bound = theory.degree_bound(n, c)
    s = theory.s0_window(n, c)[0]
    params = _params(n, s, c, Model.FAMILY, p)
    plan = SeedPlan(master_seed).child(s)
    trials = check_int(trials, "trials", min_value=1)
    held = sum(
        engine.max_layer_degree(sample_family(params, plan, i)) < bound for i in range(trials)
    )
    return held / trials


class DoublingStep(NamedTuple):
    t: int
    size: int
    next_size: int
    held: Optional[bool]


@dataclasses.dataclass(frozen=True)
class DoublingCheck:
    """Sphere growth around one source with the colors in ``excluded`` removed.

    ``held`` is ``None`` for steps outside the guard (some sphere up to ``t``
    exceeds ``n/10``); otherwise it says whether the next sphere at least
    doubled.
    """

    source: int
    color_exclusion_size: int
    excluded: ColorSet
    steps: tuple

    @property
    def guarded_steps(self):
        return [st for st in self.steps if st.held is not None]

    @property
    def all_held(self):
        return all(st.held for st in self.guarded_steps)


def doubling_steps(graph, source, excluded):
    """Record the doubling steps ``t = 1, 2, ...`` of one sphere search."""
    allowed = ColorSet.full(graph.s) - excluded
    depth = graph.s - len(excluded)
    if depth < 1:
        return ()
    sizes = engine.rainbow_spheres(graph, source, allowed, depth).sizes()
    limit = graph.n / 10
    steps = []
    largest = 0
    for t in range(1, depth):
        if sizes[t] == 0:
            break
        largest = max(largest, sizes[t])
        held = sizes[t + 1] >= 2 * sizes[t] if largest <= limit else None
        steps.append(DoublingStep(t, sizes[t], sizes[t + 1], held))
    return tuple(steps)


def check_doubling_lemma(n, c, sources, exclusion_size, master_seed=0, *, p=None):
    """Sphere-doubling measurements around random sources of one family sample.

    ``s = s0(n, c)``. Each source gets its own random excluded color set of
    ``exclusion_size`` colors, which may not exceed ``ceil(ln ln ln ln n) + 1``.
    """
    depth = theory.doubling_depth(n)
    exclusion_size = check_int(exclusion_size, "exclusion_size", min_value=0)
    if exclusion_size > depth + 1:
        raise DomainError(
            f"exclusion_size={exclusion_size} exceeds ceil(ln ln ln ln n) + 1 = {depth + 1} for n={n}"
        )
    sources = check_int(sources, "sources", min_value=1, max_value=n)
    s = theory.s0_window(n, c)[0]
    params = _params(n, s, c, Model.FAMILY, p)
    plan = SeedPlan(master_seed).child(s)
    graph = sample_family(params, plan, 0)
    rng = np.random.default_rng(plan.seed_sequence(1).spawn(1)[0])
    picked = rng.choice(n, size=sources, replace=False)
    checks = []
    for v in picked.tolist():
        excluded = ColorSet.of(rng.choice(s, size=min(exclusion_size, s), replace=False).tolist())
        checks.append(DoublingCheck(v, exclusion_size, excluded, doubling_steps(graph, v, excluded)))
    return checks


# --- result files -----------------------------------------------------------


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Model):
        return value.value
    return str(value)


def _record_row(rec, include_timing):
    u, v = rec.witness_pair if rec.witness_pair is not None else (None, None)
    return [
        rec.trial_index,
        rec.n,
        rec.s,
        rec.c,
        rec.model,
        rec.rainbow_connected,
        rec.union_connected,
        -1 if rec.union_diameter is None else rec.union_diameter,
        rec.max_layer_degree,
        u,
        v,
        rec.elapsed * 1000.0 if include_timing else None,
    ]


def record_to_dict(rec, include_timing=False):
    return {
        "trial_index": rec.trial_index,
        "n": rec.n,
        "s": rec.s,
        "c": rec.c,
        "model": Model(rec.model).value,
        "rainbow_connected": rec.rainbow_connected,
        "union_connected": rec.union_connected,
        "union_diameter": rec.union_diameter,
        "max_layer_degree": rec.max_layer_degree,
        "witness_u": None if rec.witness_pair is None else rec.witness_pair[0],
        "witness_v": None if rec.witness_pair is None else rec.witness_pair[1],
        "elapsed_ms": rec.elapsed * 1000.0 if include_timing else None,
    }


def record_from_dict(d):
    witness = None if d["witness_u"] is None else (int(d["witness_u"]), int(d["witness_v"]))
    elapsed = d.get("elapsed_ms")
    return TrialRecord(
        trial_index=int(d["trial_index"]),
        n=int(d["n"]),
        s=int(d["s"]),
        c=float(d["c"]),
        model=Model(d["model"]),
        rainbow_connected=bool(d["rainbow_connected"]),
        witness_pair=witness,
        union_connected=bool(d["union_connected"]),
        union_diameter=None if d["union_diameter"] is None else int(d["union_diameter"]),
        max_layer_degree=None if d["max_layer_degree"] is None else int(d["max_layer_degree"]),
        elapsed=0.0 if elapsed is None else float(elapsed) / 1000.0,
    )


def _csv_record(row):
    def opt_int(text):
        return None if text == "" else int(text)

    diameter = int(row["union_diameter"])
    return record_from_dict(
        {
            "trial_index": row["trial_index"],
            "n": row["n"],
            "s": row["s"],
            "c": row["c"],
            "model": row["model"],
            "rainbow_connected": row["rainbow_connected"] == "true",
            "union_connected": row["union_connected"] == "true",
            "union_diameter": None if diameter < 0 else diameter,
            "max_layer_degree": opt_int(row["max_layer_degree"]),
            "witness_u": opt_int(row["witness_u"]),
            "witness_v": opt_int(row["witness_v"]),
            "elapsed_ms": None if row["elapsed_ms"] == "" else float(row["elapsed_ms"]),
        }
    )


def format_results(items, fmt="csv", *, include_timing=False):
    """Render trial records or threshold estimates as CSV or JSON text.

    Timing is left out by default so that reruns produce identical bytes.
    """
    items = [items] if isinstance(items, (TrialRecord, ThresholdEstimate)) else list(items)
    estimates = bool(items) and isinstance(items[0], ThresholdEstimate)
    if fmt == "json":
        if estimates:
            payload = {"estimates": [e.to_dict() for e in items]}
        else:
            payload = {"records": [record_to_dict(r, include_timing) for r in items]}
        return json.dumps(payload, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if estimates:
        writer.writerow(CURVE_COLUMNS)
        for est in items:
            for pt in est.curve.values():
                writer.writerow(
                    _fmt(x)
                    for x in (est.n, est.c, Model(est.model), pt.s, pt.trials, pt.successes,
                              pt.fraction, pt.interval[0], pt.interval[1], est.s_star)
                )
    else:
        writer.writerow(CSV_COLUMNS)
        for rec in items:
            writer.writerow(_fmt(x) for x in _record_row(rec, include_timing))
    return buf.getvalue()


def emit_results(items, path, fmt="csv", *, include_timing=False):
    """Write :func:`format_results` output to ``path``."""
    text = format_results(items, fmt, include_timing=include_timing)
    try:
        with open(os.fspath(path), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ResultsIOError(f"cannot write results to {path}: {exc.strerror or exc}") from exc


def read_results(path):
    """Load records or estimates written by :func:`emit_results`."""
    try:
        with open(os.fspath(path), encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise ResultsIOError(f"cannot read results from {path}: {exc.strerror or exc}") from exc
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if "estimates" in data:
            return [ThresholdEstimate.from_dict(e) for e in data["estimates"]]
        return [record_from_dict(r) for r in data["records"]]
    rows = list(csv.DictReader(io.StringIO(text)))
    header = text.splitlines()[0].split(",") if text else []
    if tuple(header) == CSV_COLUMNS:
        return [_csv_record(row) for row in rows]
    if tuple(header) != CURVE_COLUMNS:
        raise ResultsIOError(f"{path}: unrecognized CSV header")
    grouped = {}
    for row in rows:
        key = (int(row["n"]), float(row["c"]), row["model"])
        grouped.setdefault(key, []).append(row)
    out = []
    for (n, c, model), group in grouped.items():
        out.append(
            ThresholdEstimate.from_dict(
                {
                    "n": n,
                    "c": c,
                    "model": model,
                    "s_star": None if group[0]["s_star"] == "" else int(group[0]["s_star"]),
                    "curve": group,
                }
            )
        )
    return out
