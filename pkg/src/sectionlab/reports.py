"""Study report rendering: aligned text tables and JSON.

Percents and minutes print with 2 decimals, p-values with 4, both rounded
half away from zero (so 0.03125 prints as 0.0313); arithmetic upstream is
never rounded.
"""

from __future__ import annotations

import json
from decimal import ROUND_HALF_UP, Decimal

from .study import (MeasureSummary, TLX_FACTORS, TestReport, TlxFactor,
                    tlx_evaluate)


def fmt(x: float, places: int = 2) -> str:
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def fmt_p(p: float) -> str:
    return fmt(p, 4)


_MEASURE_TITLES = {
    "sbst_score": ("SBST Score (%)", False),
    "art_score": ("ART Score (%)", False),
    "sbst_time": ("SBST Completion Time (min)", True),
    "art_time": ("ART Completion Time (min)", True),
    "sbst_timed_score": ("SBST Timed Score", False),
    "art_timed_score": ("ART Timed Score", False),
}


def _rows(summary: MeasureSummary, negate: bool):
    sign = -1.0 if negate else 1.0
    return [
        ("Min.", summary.pre_min, summary.post_min, sign * summary.improvement_of_min),
        ("Max.", summary.pre_max, summary.post_max, sign * summary.improvement_of_max),
        ("Mean", summary.pre_mean, summary.post_mean, sign * summary.improvement_of_mean),
    ]


def render_measure_table(summary: MeasureSummary) -> str:
    title, negate = _MEASURE_TITLES.get(summary.measure, (summary.measure, False))
    imp_head = "Improvement (%)"
    if negate:
        imp_head += " [Value Negated]"
    lines = [title, f"{'':<6}{'Pretest':>12}{'Posttest':>12}{imp_head:>32}"]
    for label, pre, post, imp in _rows(summary, negate):
        lines.append(f"{label:<6}{fmt(pre):>12}{fmt(post):>12}{fmt(imp):>32}")
    return "\n".join(lines)


def render_tests(tests: dict) -> str:
    lines = ["Tests (two-sided)"]
    for name in sorted(tests):
        t: TestReport = tests[name]
        lines.append(f"  {name:<24} n={t.n_effective:<3} statistic={fmt(t.statistic)}"
                     f"  p={fmt_p(t.two_sided_p)}  ({t.method})")
    return "\n".join(lines)


def render_study_report(report: dict) -> str:
    blocks = []
    order = ["sbst_score", "art_score", "sbst_time", "art_time",
             "sbst_timed_score", "art_timed_score"]
    for key in order:
        if key in report["summaries"]:
            blocks.append(render_measure_table(report["summaries"][key]))
    blocks.append(render_tests(report["tests"]))
    blocks.append(f"participants: {report['n_total']} total, "
                  f"{report['n_timed']} in time-derived measures")
    return "\n\n".join(blocks) + "\n"


def study_report_json(report: dict) -> str:
    doc = {"n_total": report["n_total"], "n_timed": report["n_timed"],
           "summaries": {}, "tests": {}}
    for key, s in report["summaries"].items():
        doc["summaries"][key] = {
            "pre": {"min": s.pre_min, "max": s.pre_max, "mean": s.pre_mean},
            "post": {"min": s.post_min, "max": s.post_max, "mean": s.post_mean},
            "improvement_percent": {
                "of_min": s.improvement_of_min,
                "of_max": s.improvement_of_max,
                "of_mean": s.improvement_of_mean,
                "of_min_holder": s.improvement_of_min_holder,
                "of_max_holder": s.improvement_of_max_holder,
            },
            "n": s.n,
        }
    for key, t in report["tests"].items():
        doc["tests"][key] = {"n_effective": t.n_effective, "statistic": t.statistic,
                             "two_sided_p": t.two_sided_p, "method": t.method}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# TLX
# ---------------------------------------------------------------------------

_TLX_TITLES = {
    TlxFactor.MENTAL: "Mental Demand",
    TlxFactor.PHYSICAL: "Physical Demand",
    TlxFactor.TEMPORAL: "Temporal Demand",
    TlxFactor.EFFORT: "Effort",
    TlxFactor.FRUSTRATION: "Frustration",
    TlxFactor.PERFORMANCE: "Performance [Value Negated]",
}


def _median(values):
    values = sorted(values)
    n = len(values)
    mid = n // 2
    return values[mid] if n % 2 else (values[mid - 1] + values[mid]) / 2.0


def tlx_cohort(responses) -> dict:
    """Adjusted-rating stats per factor plus overall workload stats."""
    evaluated = [(pid, tlx_evaluate(r)) for pid, r in responses]
    per_factor = {}
    for f in TLX_FACTORS:
        values = [e["adjusted"][f] for _, e in evaluated]
        per_factor[f.value] = {
            "max": max(values), "min": min(values),
            "median": _median(values), "mean": sum(values) / len(values),
        }
    overall = [e["overall"] for _, e in evaluated]
    return {
        "per_participant": {pid: e for pid, e in evaluated},
        "adjusted_ratings": per_factor,
        "overall": {"max": max(overall), "min": min(overall),
                    "median": _median(overall), "mean": sum(overall) / len(overall)},
    }


def render_tlx_report(cohort: dict) -> str:
    head = f"{'':<8}" + "".join(f"{_TLX_TITLES[f]:>30}" for f in TLX_FACTORS)
    lines = ["Demand factor adjusted ratings (out of 33.3)", head]
    for row in ("max", "min", "median", "mean"):
        label = {"max": "Max.", "min": "Min.", "median": "Median", "mean": "Mean"}[row]
        cells = "".join(
            f"{fmt(cohort['adjusted_ratings'][f.value][row]):>30}" for f in TLX_FACTORS)
        lines.append(f"{label:<8}{cells}")
    o = cohort["overall"]
    lines.append("")
    lines.append(f"Overall workload (out of 100): max {fmt(o['max'])}, "
                 f"min {fmt(o['min'])}, median {fmt(o['median'])}, mean {fmt(o['mean'])}")
    return "\n".join(lines) + "\n"


def tlx_report_json(cohort: dict) -> str:
    doc = {
        "adjusted_ratings": cohort["adjusted_ratings"],
        "overall": cohort["overall"],
        "per_participant": {
            pid: {
                "weights": {f.value: w for f, w in e["weights"].items()},
                "adjusted": {f.value: a for f, a in e["adjusted"].items()},
                "overall": e["overall"],
            }
            for pid, e in cohort["per_participant"].items()
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
