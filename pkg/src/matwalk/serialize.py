"""File formats: distribution tables, empirical counts, diagnostics, plot data.

CSV is RFC-4180-style UTF-8 with '.' decimal separator; every JSON document
embeds a format_version and the resolved configuration that produced it, so a
run can be reproduced from its own output.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .analyze import SeriesDiagnostic
from .simulate import EmpiricalDist
from .walk_exact import MaxDistribution

__all__ = [
    "FORMAT_VERSION",
    "dist_to_csv",
    "dist_to_json",
    "empirical_to_csv",
    "empirical_to_json",
    "diagnostic_to_json",
    "plot_to_csv",
    "load_table_csv",
]

FORMAT_VERSION = 1


def _log_prob(p: float) -> float:
    return math.log(p) if p > 0.0 else -math.inf


def dist_to_csv(dist: MaxDistribution, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "prob", "log_prob"])
        for n, p, lp in zip(dist.n, dist.prob, dist.log_prob):
            w.writerow([int(n), repr(float(p)), repr(float(lp))])


def dist_to_json(dist: MaxDistribution, path, warnings=()) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "max-distribution",
        "config": dist.config,
        "mass": dist.mass,
        "warnings": list(warnings),
        "entries": [
            {"n": int(n), "prob": float(p), "log_prob": float(lp)}
            for n, p, lp in zip(dist.n, dist.prob, dist.log_prob)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def empirical_to_csv(emp: EmpiricalDist, path) -> None:
    """Same n,prob,log_prob shape as the exact tables, plus count/censoring columns."""
    ns = np.nonzero(emp.counts)[0]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "prob", "log_prob", "count", "censored_step", "censored_height"])
        for n in ns:
            p = emp.prob(int(n))
            w.writerow([int(n), repr(p), repr(_log_prob(p)), int(emp.counts[n]),
                        emp.censored_step, emp.censored_height])


def empirical_to_json(emp: EmpiricalDist, path) -> None:
    ns = np.nonzero(emp.counts)[0]
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "empirical-distribution",
        "config": emp.config,
        "total": emp.total,
        "censored_step": emp.censored_step,
        "censored_height": emp.censored_height,
        "entries": [
            {"n": int(n), "count": int(emp.counts[n]), "prob": emp.prob(int(n)),
             "log_prob": _log_prob(emp.prob(int(n)))}
            for n in ns
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def diagnostic_to_json(diag: SeriesDiagnostic, path, config: dict,
                       passed: bool) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "diagnostic",
        "config": config,
        "passed": bool(passed),
        "verdict": diag.verdict,
        "limit_est": diag.limit_est,
        "spread": diag.spread,
        "detail": diag.detail,
        "series": [{"index": int(k), "value": float(v)} for k, v in diag.checkpoints],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def plot_to_csv(path, n, value, predicted) -> None:
    """Plot-ready table with header n,value,predicted,ratio."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "value", "predicted", "ratio"])
        for ni, vi, pi in zip(n, value, predicted):
            w.writerow([int(ni), repr(float(vi)), repr(float(pi)),
                        repr(float(vi) / float(pi))])


def load_table_csv(path, value_column=None) -> tuple:
    """Read (n, value) from a CSV with an n column and one value column.

    When ``value_column`` is None, the first of prob/value is used.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "n" not in reader.fieldnames:
            raise ValueError("table needs an 'n' column")
        if value_column is None:
            for cand in ("prob", "value"):
                if cand in reader.fieldnames:
                    value_column = cand
                    break
            else:
                raise ValueError("no prob/value column found")
        ns, vals = [], []
        for row in reader:
            ns.append(int(row["n"]))
            vals.append(float(row[value_column]))
    return np.asarray(ns), np.asarray(vals)
