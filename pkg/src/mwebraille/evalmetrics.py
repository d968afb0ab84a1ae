"""Sentence BLEU, the system score as a mean of sentence scores, and the
baseline-vs-MWE improvement column."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .errors import DataError


class EmptyReferenceList(DataError):
    pass


class EmptyList(DataError):
    pass


class LineCountMismatch(DataError):
    def __init__(self, n_hyp, n_ref):
        super().__init__(f"hypothesis has {n_hyp} lines, reference has {n_ref}")
        self.n_hyp, self.n_ref = n_hyp, n_ref


@dataclass(frozen=True)
class BleuConfig:
    max_order: int = 4
    weights: Optional[tuple] = None
    # None, or the epsilon added to zero match counts
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.weights is None:
            object.__setattr__(self, "weights", (1.0 / self.max_order,) * self.max_order)
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != self.max_order or any(x < 0 for x in w) or not math.isclose(sum(w), 1.0):
            raise ValueError("weights must be max_order non-negative numbers summing to 1")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("smoothing epsilon must be positive")

    @property
    def smoothing(self) -> str:
        return "none" if self.epsilon is None else f"add_epsilon({self.epsilon})"

    @classmethod
    def from_flag(cls, orders: int = 4, smooth: Optional[str] = None) -> "BleuConfig":
        """``smooth`` is None/"none" or "eps:<value>"."""
        if smooth in (None, "", "none"):
            return cls(orders)
        kind, _, val = smooth.partition(":")
        if kind != "eps" or not val:
            raise ValueError(f"unknown smoothing {smooth!r}; use none or eps:<value>")
        return cls(orders, epsilon=float(val))


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def modified_precision(hyp, refs, n) -> tuple[int, int]:
    """(clipped matches, total hypothesis n-grams) for order ``n``."""
    counts = ngram_counts(hyp, n)
    max_ref: Counter = Counter()
    for r in refs:
        for g, c in ngram_counts(r, n).items():
            if c > max_ref[g]:
                max_ref[g] = c
    matched = sum(min(c, max_ref[g]) for g, c in counts.items())
    return matched, sum(counts.values())


def closest_ref_length(c: int, refs) -> int:
    return min((len(r) for r in refs), key=lambda r: (abs(r - c), r))


def brevity_penalty(c: int, r: int) -> float:
    if c == 0:
        return 0.0
    return 1.0 if c >= r else math.exp(1 - r / c)


def sentence_bleu(hypothesis, references, cfg: BleuConfig = BleuConfig()) -> float:
    if not references:
        raise EmptyReferenceList("at least one reference is required")
    hyp = list(hypothesis)
    if not hyp:
        return 0.0
    log_sum = 0.0
    for n, w in enumerate(cfg.weights, 1):
        if not w:
            continue
        m, total = modified_precision(hyp, references, n)
        if m == 0:
            if cfg.epsilon is None or total == 0:
                return 0.0
            m = cfg.epsilon
        log_sum += w * math.log(m / total)
    bp = brevity_penalty(len(hyp), closest_ref_length(len(hyp), references))
    return min(1.0, bp * math.exp(log_sum))


def system_bleu(sentence_scores) -> float:
    """Arithmetic mean of sentence scores."""
    scores = list(sentence_scores)
    if not scores:
        raise EmptyList("no sentence scores")
    return math.fsum(scores) / len(scores)


def improvement(baseline: float, mwe_induced: float) -> float:
    """Absolute gain in percentage points, rounded to two decimals."""
    return round((mwe_induced - baseline) * 100, 2)


@dataclass
class EvaluationReport:
    n: int
    sentence_scores: list = field(default_factory=list)
    system_score: float = 0.0
    language_pair: str = ""
    max_order: int = 4
    smoothing: str = "none"

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_lines(hyp_lines, ref_lines, cfg: BleuConfig = BleuConfig(), language_pair="") -> EvaluationReport:
    hyp_lines, ref_lines = list(hyp_lines), list(ref_lines)
    if len(hyp_lines) != len(ref_lines):
        raise LineCountMismatch(len(hyp_lines), len(ref_lines))
    scores = [sentence_bleu(h.split(), [r.split()], cfg) for h, r in zip(hyp_lines, ref_lines)]
    system = system_bleu(scores) if scores else 0.0
    return EvaluationReport(len(scores), scores, system, language_pair, cfg.max_order, cfg.smoothing)


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def evaluate_corpus(hyp_file, ref_file, cfg: BleuConfig = BleuConfig(), language_pair="") -> EvaluationReport:
    return evaluate_lines(_read_lines(hyp_file), _read_lines(ref_file), cfg, language_pair)
