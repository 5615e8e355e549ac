"""Paired t-tests over per-topic scores and significance markers.

The Student-t tail probability is computed from the regularized incomplete
beta function, evaluated with a continued fraction (modified Lentz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 1000


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b); ``y`` may pass 1 - x exactly."""
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log(y))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, y) / b


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    t2 = t * t
    denom = df + t2
    return min(1.0, betainc(df / 2.0, 0.5, df / denom, t2 / denom))


def marker(p_value: float) -> str:
    """'++' for p < 0.001, '+' for p < 0.01, '*' for p <= 0.05, else ''."""
    if not 0.0 <= p_value <= 1.0:
        raise ValueError(f"p-value must be in [0, 1], got {p_value}")
    if p_value < 0.001:
        return "++"
    if p_value < 0.01:
        return "+"
    if p_value <= 0.05:
        return "*"
    return ""


@dataclass(frozen=True)
class TTestResult:
    n: int
    mean_diff: float
    t_statistic: float
    p_value: float

    @property
    def degrees_freedom(self) -> int:
        return self.n - 1

    @property
    def marker(self) -> str:
        return marker(self.p_value)


def paired_t(sample_a: Sequence[float], sample_b: Sequence[float]) -> TTestResult:
    """Two-sided paired t-test of ``sample_a`` against ``sample_b``.

    Identical samples give t = 0, p = 1. A constant non-zero difference has
    zero variance and gives an infinite t with p = 0.
    """
    if len(sample_a) != len(sample_b):
        raise ValueError(f"samples differ in length ({len(sample_a)} vs {len(sample_b)})")
    n = len(sample_a)
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    diffs = [a - b for a, b in zip(sample_a, sample_b)]
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        if mean == 0.0:
            return TTestResult(n, 0.0, 0.0, 1.0)
        t = math.copysign(math.inf, mean)
        return TTestResult(n, mean, t, 0.0)
    t = mean / math.sqrt(var / n)
    return TTestResult(n, mean, t, t_two_sided_p(t, n - 1))


def compare_to_baseline(per_topic: Mapping[str, Mapping[str, float]],
                        baseline: str) -> dict[str, TTestResult]:
    """Paired t-test of every system against ``baseline`` over shared topics.

    ``per_topic`` maps a system (e.g. a schema id) to its per-topic scores.
    """
    if baseline not in per_topic:
        raise KeyError(f"baseline {baseline!r} not among {sorted(per_topic)}")
    topics = sorted(per_topic[baseline])
    out = {}
    for system, scores in per_topic.items():
        if system == baseline:
            continue
        missing = sorted(set(topics) ^ set(scores))
        if missing:
            raise ValueError(f"topic sets of {system!r} and {baseline!r} differ: {', '.join(missing)}")
        out[system] = paired_t([scores[t] for t in topics],
                               [per_topic[baseline][t] for t in topics])
    return out
