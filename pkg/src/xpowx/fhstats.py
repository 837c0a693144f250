"""Binomial model for fixed-point counts, with Q-Q diagnostics.

Modeling F(p) as a sum over divisors d of p-1 of independent
Binomial(phi(d), 1/d) variables gives exact rational moments

    mu      = sum phi(d)/d
    sigma^2 = sum phi(d)(d-1)/d^2

and a normalized score z = (F - mu)/sigma per prime. Scores are
compared against N(0, 1) through descending plotting positions
(0.5^(1/n) at the top, (i - 0.3175)/(n + 0.365) in the middle,
1 - 0.5^(1/n) at the bottom), the inverse normal CDF, and the squared
Pearson correlation of the resulting Q-Q pairs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, UndefinedScoreError
from .modmath import divisors_with_phi, is_prime
from .psimap import ScanRow


@dataclass(frozen=True)
class ModelMoments:
    """Exact rational mean and variance of the modeled F(p)."""

    p: int
    mu: Fraction
    sigma2: Fraction


def moments(p: int) -> ModelMoments:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    mu = Fraction(0)
    sigma2 = Fraction(0)
    for d, ph in divisors_with_phi(p - 1):
        mu += Fraction(ph, d)
        sigma2 += Fraction(ph * (d - 1), d * d)
    return ModelMoments(p, mu, sigma2)


def z_score(F: int, m: ModelMoments) -> float:
    if m.sigma2 == 0:
        raise UndefinedScoreError(f"variance is zero at p = {m.p}")
    return (F - float(m.mu)) / math.sqrt(float(m.sigma2))


def filliben_positions(n: int) -> list[float]:
    """Descending plotting probabilities for sample size n (i = n down to 1)."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1 (got {n})")
    top = 0.5 ** (1.0 / n)
    out = [top]
    for i in range(n - 1, 1, -1):
        out.append((i - 0.3175) / (n + 0.365))
    if n > 1:
        out.append(1.0 - top)
    return out


# Peter Acklam's rational approximation of the inverse normal CDF
# (relative error < 1.15e-9 on its own), sharpened by one Halley step
# through erfc so the result is accurate to near machine precision.
_ICDF_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ICDF_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ICDF_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ICDF_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)
_ICDF_SPLIT = 0.02425


def normal_inverse_cdf(p: float) -> float:
    """Standard normal quantile for p in (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie strictly in (0, 1) (got {p})")
    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D
    if p < _ICDF_SPLIT:
        t = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) / (
            (((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0
        )
    elif p <= 1.0 - _ICDF_SPLIT:
        t = p - 0.5
        r = t * t
        x = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * t
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    else:
        t = math.sqrt(-2.0 * math.log1p(-p))
        x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) / (
            (((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0
        )
    # one Halley refinement
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_density(x: float, mu: float = 0.0, sigma: float = 1.0) -> float:
    t = (x - mu) / sigma
    return math.exp(-0.5 * t * t) / (sigma * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class QQSeries:
    """Paired descending quantiles: model on x, observations on y."""

    n: int
    theoretical: tuple[float, ...]
    observed: tuple[float, ...]
    r2: float


def _pearson_r2(xs: Sequence[float], ys: Sequence[float]) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if syy == 0.0:
        raise UndefinedScoreError("observed sequence is constant; r^2 undefined")
    if sxx == 0.0:
        raise UndefinedScoreError("theoretical sequence is constant; r^2 undefined")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return (sxy * sxy) / (sxx * syy)


def qq_series(observed: Sequence[float]) -> QQSeries:
    """Q-Q pairing of observed scores against the normal model.

    Input order is irrelevant: scores are sorted internally (descending,
    to match the descending plotting positions).
    """
    n = len(observed)
    if n < 3:
        raise DomainError(f"need at least 3 observations (got {n})")
    theo = tuple(normal_inverse_cdf(u) for u in filliben_positions(n))
    obs = tuple(sorted(observed, reverse=True))
    return QQSeries(n, theo, obs, _pearson_r2(theo, obs))


@dataclass(frozen=True)
class Histogram:
    """Left-closed right-open bins with a fitted normal overlay.

    ``overlay`` holds the N(mean, sd) density at bin centers, with mean
    and sd taken from the full score sample (sd with one delta degree of
    freedom; zeros when the sd degenerates).
    """

    lo: float
    bin_width: float
    counts: tuple[int, ...]
    overlay: tuple[float, ...]
    mean: float
    sd: float

    @property
    def edges(self) -> list[float]:
        return [self.lo + i * self.bin_width for i in range(len(self.counts) + 1)]


def histogram(scores: Sequence[float], bin_width: float, lo: float, hi: float) -> Histogram:
    if not scores:
        raise DomainError("cannot histogram an empty sample")
    if bin_width <= 0:
        raise DomainError(f"bin width must be positive (got {bin_width})")
    if hi <= lo:
        raise DomainError(f"need hi > lo (got [{lo}, {hi}])")
    nbins = max(1, math.ceil((hi - lo) / bin_width - 1e-12))
    counts = [0] * nbins
    for z in scores:
        if lo <= z < lo + nbins * bin_width:
            counts[int((z - lo) // bin_width)] += 1
    n = len(scores)
    mean = sum(scores) / n
    var = sum((z - mean) ** 2 for z in scores) / (n - 1) if n > 1 else 0.0
    sd = math.sqrt(var)
    if sd > 0:
        overlay = tuple(
            normal_density(lo + (i + 0.5) * bin_width, mean, sd) for i in range(nbins)
        )
    else:
        overlay = tuple(0.0 for _ in range(nbins))
    return Histogram(lo, bin_width, tuple(counts), overlay, mean, sd)


# --- grouping of scan rows ---------------------------------------------------

OUTLIER_PRONE_GROUP = "omega<=2"
GROUP_LABELS = (OUTLIER_PRONE_GROUP, "omega=3", "omega=4", "omega>=5")


def group_label(omega_pm1: int) -> str:
    if omega_pm1 <= 2:
        return OUTLIER_PRONE_GROUP
    if omega_pm1 >= 5:
        return "omega>=5"
    return f"omega={omega_pm1}"


def scores_for_rows(rows: Iterable[ScanRow]) -> list[tuple[ScanRow, float]]:
    """Pair each row with its z-score; rows with zero variance (p = 2)
    are skipped."""
    out = []
    for row in rows:
        m = moments(row.p)
        if m.sigma2 == 0:
            continue
        out.append((row, z_score(row.F, m)))
    return out


@dataclass(frozen=True)
class GroupSummary:
    group: str
    p_lo: int
    p_hi: int
    n: int
    mean_z: float
    sd_z: float
    r2: float | None
    outlier_prone: bool


def summarize_groups(rows: Sequence[ScanRow]) -> list[GroupSummary]:
    """Per-omega(p-1) group statistics of the normalized scores.

    The omega <= 2 group is reported but flagged: its small divisor
    structure produces many outliers under the model.
    """
    scored = scores_for_rows(rows)
    buckets: dict[str, list[tuple[ScanRow, float]]] = {}
    for row, z in scored:
        buckets.setdefault(group_label(row.omega_pm1), []).append((row, z))
    out = []
    for label in GROUP_LABELS:
        items = buckets.get(label)
        if not items:
            continue
        zs = [z for _, z in items]
        ps = [row.p for row, _ in items]
        n = len(zs)
        mean = sum(zs) / n
        sd = math.sqrt(sum((z - mean) ** 2 for z in zs) / (n - 1)) if n > 1 else 0.0
        try:
            r2 = qq_series(zs).r2 if n >= 3 else None
        except UndefinedScoreError:
            r2 = None
        out.append(
            GroupSummary(
                group=label,
                p_lo=min(ps),
                p_hi=max(ps),
                n=n,
                mean_z=mean,
                sd_z=sd,
                r2=r2,
                outlier_prone=(label == OUTLIER_PRONE_GROUP),
            )
        )
    return out


# --- CSV emitters -------------------------------------------------------------

QQ_CSV_HEADER = ("theoretical", "observed")
HIST_CSV_HEADER = ("bin_lo", "bin_hi", "count", "overlay")
SUMMARY_CSV_HEADER = ("p_lo", "p_hi", "group", "n", "mean_z", "sd_z", "r2", "flag")


def write_qq_csv(series: QQSeries, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(QQ_CSV_HEADER)
        for t, o in zip(series.theoretical, series.observed):
            w.writerow((f"{t:.10g}", f"{o:.10g}"))


def write_hist_csv(hist: Histogram, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HIST_CSV_HEADER)
        edges = hist.edges
        for i, (c, ov) in enumerate(zip(hist.counts, hist.overlay)):
            w.writerow((f"{edges[i]:.10g}", f"{edges[i + 1]:.10g}", c, f"{ov:.10g}"))


def write_summary_csv(summaries: Iterable[GroupSummary], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_CSV_HEADER)
        for s in summaries:
            w.writerow(
                (
                    s.p_lo,
                    s.p_hi,
                    s.group,
                    s.n,
                    f"{s.mean_z:.10g}",
                    f"{s.sd_z:.10g}",
                    "" if s.r2 is None else f"{s.r2:.10g}",
                    "outlier-prone" if s.outlier_prone else "",
                )
            )
