"""Sweeps over whole spin sectors, sampled sweeps, and report persistence."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bellscan import CIRELSON, bell_max_many
from .correlator import MAX_DEDUP_TWO_S, distinct_correlations, fingerprint_matrix, group_by_fingerprint
from .parityobs import ParityMask, _as_mask
from .spinrep import SpinLabel, _as_spin

__all__ = [
    "HIST_LO",
    "HIST_HI",
    "HIST_WIDTH",
    "SampleSpec",
    "SurveyReport",
    "survey",
    "sample_survey",
    "emit",
    "load_report",
    "random_masks",
    "format_csv",
]

log = logging.getLogger(__name__)

HIST_LO, HIST_HI, HIST_WIDTH = 2.0, 2.9, 0.02
CSV_FIELDS = ["P", "group", "theta_star", "b_max", "violates"]


@dataclass
class SampleSpec:
    count: int = 0
    seed: int = 0
    include: list[int] = field(default_factory=list)


@dataclass
class SurveyReport:
    spin: SpinLabel
    records: list[dict]
    histogram: dict
    totals: dict
    provenance: dict
    sampled: bool = False

    def to_dict(self) -> dict:
        return {
            "spin": str(self.spin),
            "two_s": self.spin.two_s,
            "sampled": self.sampled,
            "totals": self.totals,
            "histogram": self.histogram,
            "provenance": self.provenance,
            "records": self.records,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SurveyReport":
        return cls(
            spin=SpinLabel(d["two_s"]),
            records=[dict(r) for r in d["records"]],
            histogram=d["histogram"],
            totals=d["totals"],
            provenance=d["provenance"],
            sampled=d["sampled"],
        )

    def group_b_max(self) -> dict[int, float]:
        return {r["group"]: r["b_max"] for r in self.records}


def _histogram(values) -> dict:
    nbins = int(round((HIST_HI - HIST_LO) / HIST_WIDTH))
    edges = HIST_LO + HIST_WIDTH * np.arange(nbins + 1)
    values = np.asarray(values, dtype=float)
    # out-of-range values land in the end bins and are also counted separately
    counts, _ = np.histogram(np.clip(values, HIST_LO, HIST_HI), bins=edges)
    return {
        "edges": [round(float(e), 10) for e in edges],
        "counts": counts.tolist(),
        "underflow": int(np.sum(values < HIST_LO)),
        "overflow": int(np.sum(values > HIST_HI)),
    }


def _assemble(spin: SpinLabel, groups: list[list[ParityMask]], grid: int, tol: float,
              threads: int, mode: str, started: float, extra: dict | None = None) -> SurveyReport:
    from . import __version__

    reps = [g[0] for g in groups]
    results = bell_max_many(spin, reps, grid, tol, threads=threads)
    records = []
    for gid, (members, res) in enumerate(zip(groups, results)):
        for m in members:
            records.append({
                "P": m.bits,
                "group": gid,
                "theta_star": res.theta_star,
                "b_max": res.b_max,
                "violates": res.violates,
            })
    records.sort(key=lambda r: (r["P"], r["group"]))

    b = np.array([r.b_max for r in results])
    best = int(np.argmax(b))
    totals = {
        "independent": (1 << (spin.N - 1)) - 1,
        "evaluated": len(records),
        "distinct": len(groups),
        "min_b_max": float(b.min()),
        "max_b_max": float(b.max()),
        "argmax_group": best,
        "argmax_P": [m.bits for m in groups[best]],
        "non_violating_groups": int(np.sum(b <= 2)),
        "cirelson_margin": float(CIRELSON - b.max()),
    }
    provenance = {
        "mode": mode,
        "grid": grid,
        "tol": tol,
        "version": __version__,
        "wall_time_s": time.perf_counter() - started,
    }
    if extra:
        provenance.update(extra)
    return SurveyReport(spin, records, _histogram(b), totals, provenance, sampled=mode == "sampled")


def survey(spin, grid: int = 4096, tol: float = 1e-9, threads: int = 1) -> SurveyReport:
    """Exhaustive sweep: one bell_max per distinct correlation function."""
    spin = _as_spin(spin)
    if spin.two_s > MAX_DEDUP_TWO_S:
        raise ValueError(
            f"exhaustive survey is capped at two_s = {MAX_DEDUP_TWO_S}; use sample_survey"
        )
    started = time.perf_counter()
    groups = distinct_correlations(spin)
    return _assemble(spin, groups, grid, tol, threads, "exhaustive", started)


def random_masks(spin, count: int, seed: int, exclude=()) -> list[int]:
    """``count`` distinct canonical P values, deterministic in (seed, draw index).

    Each draw ``i`` uses its own Philox stream with key ``seed`` and counter
    ``i``, so any shard of indices can be regenerated independently.
    """
    spin = _as_spin(spin)
    N = spin.N
    lo, hi = 1 << (N - 1), (1 << N) - 1
    available = hi - lo - len({p for p in exclude if lo <= p < hi})
    if count > available:
        raise ValueError(f"cannot draw {count} new masks; only {available} remain")
    seen = set(exclude)
    out = []
    index = 0
    while len(out) < count:
        rng = np.random.Generator(np.random.Philox(key=seed, counter=index))
        P = int(rng.integers(lo, hi))
        index += 1
        if P not in seen:
            seen.add(P)
            out.append(P)
    return out


def sample_survey(spin, spec: SampleSpec, grid: int = 4096, tol: float = 1e-9,
                  threads: int = 1) -> SurveyReport:
    """Survey of explicit masks plus a seeded random fill (for large N).

    Explicit P values are kept as given (they need not be canonical) and
    always come before the random ones; repeated P values are collapsed.
    """
    spin = _as_spin(spin)
    started = time.perf_counter()
    include, dupes = [], 0
    for P in spec.include:
        mask = _as_mask(spin, int(P))
        if mask.is_trivial:
            raise ValueError(f"P={P} is a trivial observable")
        if mask.bits in include:
            dupes += 1
            continue
        include.append(mask.bits)
    if dupes:
        log.warning("collapsed %d duplicate P value(s)", dupes)
    drawn = random_masks(spin, spec.count, spec.seed, exclude=include)
    masks = [ParityMask(spin, P) for P in include + drawn]
    if not masks:
        raise ValueError("sample is empty: give include values or a positive count")

    masks.sort()
    labels = group_by_fingerprint(fingerprint_matrix(spin, masks))
    groups: list[list[ParityMask]] = [[] for _ in range(labels.max() + 1)]
    for m, lab in zip(masks, labels):
        groups[lab].append(m)
    extra = {"seed": spec.seed, "count": spec.count, "include": include,
             "duplicates_collapsed": dupes}
    return _assemble(spin, groups, grid, tol, threads, "sampled", started, extra)


def format_csv(report: SurveyReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in report.records:
        writer.writerow([r["P"], r["group"], repr(r["theta_star"]), repr(r["b_max"]),
                         str(r["violates"]).lower()])
    meta = report.to_dict()
    del meta["records"]
    buf.write("#meta " + json.dumps(meta, sort_keys=True) + "\n")
    return buf.getvalue()


def emit(report: SurveyReport, path, format: str = "json") -> Path:
    """Write ``report`` as JSON (full report) or CSV (records + #meta trailer)."""
    path = Path(path)
    if format == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    elif format == "csv":
        text = format_csv(report)
    else:
        raise ValueError(f"unknown format {format!r}")
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def load_report(path) -> SurveyReport:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read report from {path}: {exc}") from exc
    if text.lstrip().startswith("{"):
        return SurveyReport.from_dict(json.loads(text))

    lines = text.splitlines()
    meta_lines = [ln for ln in lines if ln.startswith("#meta ")]
    if len(meta_lines) != 1:
        raise ValueError(f"{path}: expected exactly one #meta line")
    meta = json.loads(meta_lines[0][len("#meta "):])
    rows = csv.DictReader(ln for ln in lines if not ln.startswith("#"))
    meta["records"] = [
        {
            "P": int(r["P"]),
            "group": int(r["group"]),
            "theta_star": float(r["theta_star"]),
            "b_max": float(r["b_max"]),
            "violates": r["violates"] == "true",
        }
        for r in rows
    ]
    return SurveyReport.from_dict(meta)
