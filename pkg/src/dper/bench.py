"""Benchmark records, PAR-2 scoring, and reference-answer checking.

A run's PAR-2 score is its wall time if it solved the instance within the
cap, and twice the cap otherwise.  Summaries report the mean PAR-2 score with
a 95% Student-t confidence interval over the per-instance scores.  An answer
that disagrees with a reference value by more than 1e-6 disqualifies the run:
it is scored as unsolved.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import scipy.stats

REF_TOLERANCE = 1e-6


@dataclass
class BenchRecord:
    name: str
    solved: bool
    seconds: float
    answer: float | None = None
    width: int | None = None
    peak_nodes: int | None = None
    error: str | None = None
    disqualified: bool = False

    def par2(self, cap: float) -> float:
        return self.seconds if self.solved else 2.0 * cap


@dataclass
class BenchSummary:
    records: list[BenchRecord]
    cap: float
    mean_par2: float = 0.0
    ci95: tuple[float, float] = (math.nan, math.nan)
    solved: int = 0
    disqualified: int = 0

    def __post_init__(self):
        scores = [r.par2(self.cap) for r in self.records]
        self.solved = sum(r.solved for r in self.records)
        self.disqualified = sum(r.disqualified for r in self.records)
        if scores:
            self.mean_par2, self.ci95 = mean_with_ci(scores)


def mean_with_ci(scores, confidence: float = 0.95):
    """Mean and Student-t confidence interval of the mean."""
    n = len(scores)
    mean = sum(scores) / n
    if n < 2:
        return mean, (mean, mean)
    var = sum((s - mean) ** 2 for s in scores) / (n - 1)
    half = scipy.stats.t.ppf(0.5 + confidence / 2.0, n - 1) * math.sqrt(var / n)
    return mean, (mean - half, mean + half)


def apply_reference_answers(records: list[BenchRecord],
                            refs: dict[str, float]) -> None:
    """Disqualify solved records whose answer strays beyond the tolerance."""
    for r in records:
        ref = refs.get(r.name)
        if r.solved and ref is not None and r.answer is not None:
            if abs(r.answer - ref) > REF_TOLERANCE:
                r.disqualified = True
                r.solved = False


def load_reference_answers(text: str) -> dict[str, float]:
    """Parse 'name value' lines; '#' starts a comment."""
    out: dict[str, float] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, value = line.rsplit(None, 1)
        out[name] = float(value)
    return out


def records_to_csv(records: list[BenchRecord], cap: float) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["name", "solved", "seconds", "par2", "answer", "width"])
    for r in records:
        writer.writerow([
            r.name,
            int(r.solved),
            f"{r.seconds:.6f}",
            f"{r.par2(cap):.6f}",
            "" if r.answer is None else f"{r.answer:.17g}",
            "" if r.width is None else r.width,
        ])
    return buf.getvalue()


def summarize(records: list[BenchRecord], cap: float) -> BenchSummary:
    return BenchSummary(records=records, cap=cap)
