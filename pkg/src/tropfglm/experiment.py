"""Precision-loss experiments on random dense systems.

Each instance draws three (or ``len(degrees)``) polynomials with Haar
random coefficients at precision ``N``, computes a source basis with the
Macaulay oracle (weight zero and grevlex, or classical grevlex), converts
it and records the loss ``N - prec`` of every output coefficient.
"""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .errors import TropFGLMError
from .fglm import change_ordering, coefficient_precisions
from .gb_oracle import macaulay_gb, random_system
from .polyring import TermOrder
from .valued_field import FieldConfig

MODES = ("trop-to-lex", "trop-to-trop", "classical-to-lex")
CSV_HEADER = ["seed", "d1", "d2", "d3", "delta", "time_s", "loss_mean", "loss_max", "cond", "xi"]
TARGET_WEIGHT = (-2, 4, -8)


@dataclass
class InstanceRecord:
    seed: int
    degrees: tuple
    delta: int | None = None
    time_s: float | None = None
    loss_mean: float | None = None
    loss_max: float | None = None
    cond: float | None = None
    xi: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def csv_row(self) -> list:
        d = list(self.degrees) + [""] * (3 - len(self.degrees))

        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, float):
                return f"{x:.6g}"
            return str(x)

        return [self.seed] + d[:3] + [fmt(v) for v in (self.delta, self.time_s, self.loss_mean, self.loss_max, self.cond, self.xi)]


@dataclass
class ExperimentReport:
    prime: int
    mode: str
    precision: int
    records: list = field(default_factory=list)

    @property
    def completed(self) -> list:
        return [r for r in self.records if r.ok]

    def aggregates(self) -> dict:
        done = self.completed
        out = {"instances": len(self.records), "completed": len(done)}
        if done:
            out["loss_mean"] = sum(r.loss_mean for r in done) / len(done)
            out["loss_max"] = max(r.loss_max for r in done)
            out["time_s"] = sum(r.time_s for r in done) / len(done)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.records:
            w.writerow(r.csv_row())
        return buf.getvalue()

    def table(self) -> str:
        lines = [f"p={self.prime} mode={self.mode} N={self.precision}"]
        lines.append(f"{'seed':>6} {'degrees':>9} {'delta':>5} {'time_s':>8} {'mean':>8} {'max':>6} {'cond':>5} {'xi':>5}")
        for r in self.records:
            deg = ",".join(map(str, r.degrees))
            if not r.ok:
                lines.append(f"{r.seed:>6} {deg:>9}  failed: {r.error}")
                continue
            cond = "-" if r.cond is None else str(r.cond)
            lines.append(
                f"{r.seed:>6} {deg:>9} {r.delta:>5} {r.time_s:>8.3f} {r.loss_mean:>8.2f} {r.loss_max:>6} {cond:>5} {r.xi:>5}"
            )
        agg = self.aggregates()
        lines.append(f"completed {agg['completed']}/{agg['instances']}")
        if agg["completed"]:
            lines.append(f"mean loss {agg['loss_mean']:.3f}, max loss {agg['loss_max']}")
        return "\n".join(lines) + "\n"


def loss_ratios(num: ExperimentReport, den: ExperimentReport) -> dict:
    """Arithmetic and geometric means of per-seed ratios of mean loss.

    Seeds where either run failed or the denominator loss is zero are skipped.
    """
    by_seed = {(r.seed, r.degrees): r for r in den.completed}
    ratios = []
    for r in num.completed:
        o = by_seed.get((r.seed, r.degrees))
        if o is None or not o.loss_mean:
            continue
        ratios.append(r.loss_mean / o.loss_mean)
    if not ratios:
        return {"count": 0}
    pos = [x for x in ratios if x > 0]
    geo = math.exp(sum(math.log(x) for x in pos) / len(pos)) if pos else 0.0
    return {"count": len(ratios), "arithmetic": sum(ratios) / len(ratios), "geometric": geo}


def run_instance(p: int, degrees, seed: int, mode: str, precision: int) -> InstanceRecord:
    rec = InstanceRecord(seed, tuple(degrees))
    n = len(degrees)
    cfg = FieldConfig("p-adic", p, precision)
    try:
        F = random_system(cfg, n, degrees, precision, seed)
        if mode == "classical-to-lex":
            src_order = TermOrder.grevlex()
        else:
            src_order = TermOrder.tropical((0,) * n)
        if mode == "trop-to-trop":
            target = TermOrder.tropical(TARGET_WEIGHT[:n] if n <= 3 else [0] * n)
        else:
            target = TermOrder.lex()
        t0 = time.thread_time()
        G = macaulay_gb(F, src_order)
        out, _, diag = change_ordering(G, target, "general")
        rec.time_s = time.thread_time() - t0
        precs = [x for x in coefficient_precisions(out) if x != math.inf]
        losses = [precision - x for x in precs] or [0]
        rec.loss_mean = sum(losses) / len(losses)
        rec.loss_max = max(losses)
        rec.delta = diag["delta"]
        rec.cond = diag["cond"]
        rec.xi = diag["xi"]
    except (TropFGLMError, ZeroDivisionError, ValueError) as e:
        rec.error = f"{type(e).__name__}: {e}"
    return rec


def run_experiment(p: int, degree_sets, reps: int, seed: int, mode: str, precision: int = 200, threads=None) -> ExperimentReport:
    """Run ``reps`` instances per degree tuple; seeds are ``seed, seed+1, ...``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if threads is None:
        threads = int(os.environ.get("TROPFGLM_THREADS", "1") or 1)
    jobs = [(tuple(d), seed + k) for d in degree_sets for k in range(reps)]
    report = ExperimentReport(p, mode, precision)
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run_instance, p, d, s, mode, precision) for d, s in jobs]
            report.records = [f.result() for f in futures]
    else:
        report.records = [run_instance(p, d, s, mode, precision) for d, s in jobs]
    return report


def record_dict(r: InstanceRecord) -> dict:
    return asdict(r)
