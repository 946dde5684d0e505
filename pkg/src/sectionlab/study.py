"""Study analytics: scores, completion-time apportionment, timed scores,
improvement percentages, exact Sign and Wilcoxon matched-pairs signed-rank
tests, and NASA TLX workload arithmetic.

Test policy (fixed, not configurable): zero differences are dropped before
either test; absolute differences receive average ranks on ties; exact
two-sided p-values come from the full sign-assignment distribution for
n <= 25 and from a normal approximation with continuity correction above.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations

from .errors import (AllTies, ArityError, DegenerateBaseline, DegenerateTest,
                     EmptyCohort, HeaderError, InvalidDuration, PairSetError,
                     ParseError, RangeError)

EXACT_LIMIT = 25


class TlxFactor(Enum):
    MENTAL = "mental"
    PHYSICAL = "physical"
    TEMPORAL = "temporal"
    EFFORT = "effort"
    FRUSTRATION = "frustration"
    PERFORMANCE = "performance"


TLX_FACTORS = list(TlxFactor)
TLX_PAIRS = list(combinations(TLX_FACTORS, 2))  # 15 unordered pairs


@dataclass
class ParticipantRecord:
    participant_id: str
    sbst_pre: float
    sbst_post: float
    art_pre: float
    art_post: float
    pretest_total_min: float | None = None
    sbst_post_min: float | None = None
    art_post_min: float | None = None
    sbst_pre_min: float | None = None   # derived
    art_pre_min: float | None = None    # derived
    excluded: bool = False

    def __post_init__(self):
        for name in ("sbst_pre", "sbst_post", "art_pre", "art_post"):
            v = getattr(self, name)
            if not (0.0 <= v <= 100.0):
                raise RangeError(f"{self.participant_id}: {name}={v} outside [0, 100]")
        for name in ("pretest_total_min", "sbst_post_min", "art_post_min"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise InvalidDuration(f"{self.participant_id}: {name}={v} must be > 0")


@dataclass(frozen=True)
class TlxResponse:
    """Six factor rates in [0, 100] plus the 15 pairwise choices."""

    rates: dict           # TlxFactor -> rate
    pairwise: dict        # frozenset({a, b}) -> chosen TlxFactor

    def __post_init__(self):
        if set(self.rates) != set(TLX_FACTORS):
            raise ArityError("rates must cover exactly the six demand factors")
        for f, r in self.rates.items():
            if not (0.0 <= r <= 100.0):
                raise RangeError(f"rate {f.value}={r} outside [0, 100]")


@dataclass(frozen=True)
class TestReport:
    n_effective: int
    statistic: float
    two_sided_p: float
    method: str  # "exact" | "approximation"


# ---------------------------------------------------------------------------
# scores and times
# ---------------------------------------------------------------------------

def score_percent(correct: int, total: int) -> float:
    """100 * correct / total."""
    if total <= 0:
        raise DegenerateTest("a test with no questions cannot be scored")
    if not (0 <= correct <= total):
        raise RangeError(f"correct={correct} outside [0, {total}]")
    return 100.0 * correct / total


def derive_pretest_times(pretest_total: float, sbst_post_time: float,
                         art_post_time: float) -> tuple:
    """Apportion the pretest session (minus the 5-minute paperwork allowance)
    between the two tests using their posttest-time ratio."""
    if sbst_post_time <= 0 or art_post_time <= 0:
        raise InvalidDuration("posttest times must be positive")
    budget = pretest_total - 5.0
    if budget <= 0:
        raise InvalidDuration(
            f"pretest total {pretest_total} leaves no time after the 5 min deduction")
    sbst_pre = budget * sbst_post_time / (sbst_post_time + art_post_time)
    return sbst_pre, budget - sbst_pre


def timed_score(score: float, time_minutes: float) -> float:
    """Test score divided by completion time."""
    if time_minutes <= 0:
        raise InvalidDuration(f"completion time {time_minutes} must be > 0")
    return score / time_minutes


def improvement_percent(pre: float, post: float) -> float:
    """Signed change 100 * (post - pre) / pre; reductions come out negative
    and are negated at display time for time-like measures."""
    if pre <= 0:
        raise DegenerateBaseline(f"baseline {pre} must be positive")
    return 100.0 * (post - pre) / pre


# ---------------------------------------------------------------------------
# exact nonparametric tests
# ---------------------------------------------------------------------------

def sign_test(diffs) -> TestReport:
    """Exact two-sided Sign test on the signs of paired differences.

    Zeros are dropped; with k positives among n nonzero diffs the p-value is
    2 * min(P(X <= k), P(X >= k)) under Binomial(n, 1/2), capped at 1.
    """
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        raise AllTies("all paired differences are zero")
    n = len(nonzero)
    k = sum(1 for d in nonzero if d > 0)
    lo = sum(math.comb(n, i) for i in range(0, k + 1)) / 2.0 ** n
    hi = sum(math.comb(n, i) for i in range(k, n + 1)) / 2.0 ** n
    p = min(1.0, 2.0 * min(lo, hi))
    return TestReport(n_effective=n, statistic=float(k), two_sided_p=p, method="exact")


def _average_ranks(values) -> list:
    """Ranks 1..n with average ranks on ties."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _exact_rank_sum_cdf(ranks, w) -> float:
    """P(sum of a uniformly random subset of ranks <= w).

    Dynamic program over doubled ranks (average ranks are half-integers),
    equivalent to enumerating all 2^n sign assignments.
    """
    doubled = [int(round(2 * r)) for r in ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for d in doubled:
        for s in range(total, d - 1, -1):
            if counts[s - d]:
                counts[s] += counts[s - d]
    limit = int(math.floor(2 * w + 1e-9))
    favorable = sum(counts[s] for s in range(0, min(limit, total) + 1))
    return favorable / (2.0 ** len(ranks))


def wilcoxon_signed_rank(pre, post) -> TestReport:
    """Exact Wilcoxon matched-pairs signed-rank test (two-sided).

    Differences post - pre; zeros dropped; |d| ranked with average ranks on
    ties; W = min(W+, W-). For n <= 25 the two-sided p is
    2 * P(rank-subset sum <= W) from the full sign-assignment distribution
    (capped at 1); beyond that a normal approximation with tie correction
    and continuity correction is used.
    """
    if len(pre) != len(post):
        raise ArityError("pre and post must have equal lengths")
    if len(pre) < 2:
        raise ArityError("need at least two pairs")
    diffs = [b - a for a, b in zip(pre, post) if b - a != 0]
    if not diffs:
        raise AllTies("all paired differences are zero")
    n = len(diffs)
    abs_d = [abs(d) for d in diffs]
    ranks = _average_ranks(abs_d)
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    w_minus = sum(r for r, d in zip(ranks, diffs) if d < 0)
    w = min(w_plus, w_minus)
    if n <= EXACT_LIMIT:
        p = min(1.0, 2.0 * _exact_rank_sum_cdf(ranks, w))
        return TestReport(n_effective=n, statistic=w, two_sided_p=p, method="exact")
    mean = n * (n + 1) / 4.0
    tie_counts = {}
    for d in abs_d:
        tie_counts[d] = tie_counts.get(d, 0) + 1
    tie_term = sum(t ** 3 - t for t in tie_counts.values()) / 48.0
    sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
    z = (w - mean + 0.5) / sigma
    p = min(1.0, 2.0 * 0.5 * math.erfc(-z / math.sqrt(2.0)))
    return TestReport(n_effective=n, statistic=w, two_sided_p=p, method="approximation")


# ---------------------------------------------------------------------------
# NASA TLX
# ---------------------------------------------------------------------------

def tlx_weights(pairwise) -> dict:
    """Count pairwise wins per factor; weights sum to 15, each in [0, 5].

    ``pairwise`` maps each unordered factor pair (frozenset of two
    TlxFactor) to the factor chosen as contributing more.
    """
    expected = {frozenset(p) for p in TLX_PAIRS}
    got = {frozenset(k) for k in pairwise}
    if got != expected:
        raise PairSetError("choices must cover each of the 15 factor pairs exactly once")
    if len(pairwise) != 15:
        raise PairSetError("exactly 15 pairwise choices required")
    weights = {f: 0 for f in TLX_FACTORS}
    for pair, chosen in pairwise.items():
        pair = frozenset(pair)
        if chosen not in pair:
            raise PairSetError(
                f"chosen factor {chosen} is not a member of its pair {set(pair)}")
        weights[chosen] += 1
    return weights


def tlx_adjusted(rate: float, weight: int) -> float:
    """Adjusted rating = rate * weight / 15 (maximum 100 * 5 / 15 = 33.33...)."""
    if not (0.0 <= rate <= 100.0):
        raise RangeError(f"rate {rate} outside [0, 100]")
    if not (0 <= weight <= 5):
        raise RangeError(f"weight {weight} outside [0, 5]")
    return rate * weight / 15.0


def tlx_overall(adjusted) -> float:
    """Overall workload: sum of the six adjusted ratings (maximum 100)."""
    values = list(adjusted)
    if len(values) != 6:
        raise ArityError(f"need exactly 6 adjusted ratings, got {len(values)}")
    return float(sum(values))


def tlx_evaluate(response: TlxResponse) -> dict:
    """Weights, adjusted ratings, and overall workload for one response."""
    weights = tlx_weights(response.pairwise)
    adjusted = {f: tlx_adjusted(response.rates[f], weights[f]) for f in TLX_FACTORS}
    return {
        "weights": weights,
        "adjusted": adjusted,
        "overall": tlx_overall(adjusted.values()),
    }


# ---------------------------------------------------------------------------
# cohort summaries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureSummary:
    """Min/max/mean for one measure across sessions.

    The min/max improvement rows are ambiguous when different participants
    hold the pre and post extrema, so both pairings are reported:
    column-wise (extreme pre value vs extreme post value) and by-participant
    (the improvement of whoever held the pretest extremum).
    """

    measure: str
    pre_min: float
    pre_max: float
    pre_mean: float
    post_min: float
    post_max: float
    post_mean: float
    improvement_of_min: float     # column-wise
    improvement_of_max: float
    improvement_of_mean: float
    improvement_of_min_holder: float  # by-participant pairing
    improvement_of_max_holder: float
    n: int


def _col_stats(values):
    return min(values), max(values), sum(values) / len(values)


def _summary(measure, pre, post) -> MeasureSummary:
    pre_min, pre_max, pre_mean = _col_stats(pre)
    post_min, post_max, post_mean = _col_stats(post)
    i_min = min(range(len(pre)), key=lambda i: pre[i])
    i_max = max(range(len(pre)), key=lambda i: pre[i])
    return MeasureSummary(
        measure=measure,
        pre_min=pre_min, pre_max=pre_max, pre_mean=pre_mean,
        post_min=post_min, post_max=post_max, post_mean=post_mean,
        improvement_of_min=improvement_percent(pre_min, post_min),
        improvement_of_max=improvement_percent(pre_max, post_max),
        improvement_of_mean=improvement_percent(pre_mean, post_mean),
        improvement_of_min_holder=improvement_percent(pre[i_min], post[i_min]),
        improvement_of_max_holder=improvement_percent(pre[i_max], post[i_max]),
        n=len(pre),
    )


def with_derived_times(records) -> list:
    """Fill sbst_pre_min / art_pre_min wherever the inputs are present."""
    out = []
    for r in records:
        if (r.pretest_total_min is not None and r.sbst_post_min is not None
                and r.art_post_min is not None):
            sbst_pre, art_pre = derive_pretest_times(
                r.pretest_total_min, r.sbst_post_min, r.art_post_min)
            out.append(replace(r, sbst_pre_min=sbst_pre, art_pre_min=art_pre))
        else:
            out.append(replace(r))
    return out


def cohort_summary(records) -> dict:
    """Min/max/mean tables for scores, completion times, and timed scores.

    Scores cover every participant; time-derived measures omit participants
    flagged ``excluded`` (outlier pretest durations) and participants whose
    time data is missing.
    """
    records = with_derived_times(records)
    if not records:
        raise EmptyCohort("no participants")
    scores = records
    timed = [r for r in records
             if not r.excluded and r.sbst_pre_min is not None]
    summaries = {
        "sbst_score": _summary("sbst_score",
                               [r.sbst_pre for r in scores],
                               [r.sbst_post for r in scores]),
        "art_score": _summary("art_score",
                              [r.art_pre for r in scores],
                              [r.art_post for r in scores]),
    }
    tests = {}

    def _try(name, fn, *args):
        # degenerate cohorts (all ties, single pair) just omit the test
        try:
            tests[name] = fn(*args)
        except (AllTies, ArityError):
            pass

    _try("sbst_score_sign", sign_test, [r.sbst_post - r.sbst_pre for r in scores])
    _try("art_score_sign", sign_test, [r.art_post - r.art_pre for r in scores])
    _try("sbst_score_wilcoxon", wilcoxon_signed_rank,
         [r.sbst_pre for r in scores], [r.sbst_post for r in scores])
    _try("art_score_wilcoxon", wilcoxon_signed_rank,
         [r.art_pre for r in scores], [r.art_post for r in scores])
    if timed:
        summaries["sbst_time"] = _summary(
            "sbst_time", [r.sbst_pre_min for r in timed],
            [r.sbst_post_min for r in timed])
        summaries["art_time"] = _summary(
            "art_time", [r.art_pre_min for r in timed],
            [r.art_post_min for r in timed])
        sbst_ts_pre = [timed_score(r.sbst_pre, r.sbst_pre_min) for r in timed]
        sbst_ts_post = [timed_score(r.sbst_post, r.sbst_post_min) for r in timed]
        art_ts_pre = [timed_score(r.art_pre, r.art_pre_min) for r in timed]
        art_ts_post = [timed_score(r.art_post, r.art_post_min) for r in timed]
        summaries["sbst_timed_score"] = _summary("sbst_timed_score",
                                                 sbst_ts_pre, sbst_ts_post)
        summaries["art_timed_score"] = _summary("art_timed_score",
                                                art_ts_pre, art_ts_post)
        _try("sbst_timed_sign", sign_test,
             [b - a for a, b in zip(sbst_ts_pre, sbst_ts_post)])
        _try("art_timed_sign", sign_test,
             [b - a for a, b in zip(art_ts_pre, art_ts_post)])
        _try("sbst_timed_wilcoxon", wilcoxon_signed_rank, sbst_ts_pre, sbst_ts_post)
        _try("art_timed_wilcoxon", wilcoxon_signed_rank, art_ts_pre, art_ts_post)
    return {"summaries": summaries, "tests": tests,
            "n_total": len(scores), "n_timed": len(timed)}


def iqr_outlier_flags(durations, factor: float = 1.5) -> list:
    """Optional helper: True where a pretest duration exceeds Q3 + factor*IQR
    or undercuts Q1 - factor*IQR. Never applied silently."""
    values = sorted(d for d in durations if d is not None)
    if not values:
        return [False] * len(durations)

    def percentile(q):
        idx = q * (len(values) - 1)
        lo = int(math.floor(idx))
        hi = int(math.ceil(idx))
        return values[lo] + (values[hi] - values[lo]) * (idx - lo)

    q1, q3 = percentile(0.25), percentile(0.75)
    iqr = q3 - q1
    lo_cut, hi_cut = q1 - factor * iqr, q3 + factor * iqr
    return [d is not None and (d < lo_cut or d > hi_cut) for d in durations]


# ---------------------------------------------------------------------------
# CSV surface
# ---------------------------------------------------------------------------

STUDY_HEADER = ["participant_id", "sbst_pre", "sbst_post", "art_pre", "art_post",
                "pretest_total_min", "sbst_post_min", "art_post_min", "excluded"]

TLX_HEADER = (["participant_id"] + [f.value for f in TLX_FACTORS]
              + [f"pair_{a.value}_{b.value}" for a, b in TLX_PAIRS])


def _opt_float(text, what, path, line):
    text = text.strip()
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"non-numeric {what}: {text!r}", path, line) from None


def parse_study_csv(path) -> list:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderError("empty study CSV", path, 1) from None
        if header != STUDY_HEADER:
            raise HeaderError(
                f"expected header {','.join(STUDY_HEADER)!r}", path, 1)
        records = []
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(STUDY_HEADER):
                raise ParseError(f"expected {len(STUDY_HEADER)} fields", path, line)
            records.append(ParticipantRecord(
                participant_id=row[0],
                sbst_pre=float(row[1]), sbst_post=float(row[2]),
                art_pre=float(row[3]), art_post=float(row[4]),
                pretest_total_min=_opt_float(row[5], "pretest_total_min", path, line),
                sbst_post_min=_opt_float(row[6], "sbst_post_min", path, line),
                art_post_min=_opt_float(row[7], "art_post_min", path, line),
                excluded=row[8].strip().lower() in ("1", "true", "yes"),
            ))
    return records


def parse_tlx_csv(path) -> list:
    """Rows of (participant_id, TlxResponse)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderError("empty TLX CSV", path, 1) from None
        if header != TLX_HEADER:
            raise HeaderError(f"expected header {','.join(TLX_HEADER)!r}", path, 1)
        out = []
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(TLX_HEADER):
                raise ParseError(f"expected {len(TLX_HEADER)} fields", path, line)
            rates = {f: float(row[1 + i]) for i, f in enumerate(TLX_FACTORS)}
            pairwise = {}
            for i, (a, b) in enumerate(TLX_PAIRS):
                token = row[7 + i].strip().lower()
                try:
                    chosen = TlxFactor(token)
                except ValueError:
                    raise ParseError(f"unknown factor {token!r}", path, line) from None
                pairwise[frozenset((a, b))] = chosen
            out.append((row[0], TlxResponse(rates=rates, pairwise=pairwise)))
    return out
