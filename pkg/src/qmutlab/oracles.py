"""Test oracles: Wrong Output Oracle (WOO) and Output Probability Oracle (OPO)."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

from scipy.special import gammaincc

from .circuit import OutputDominance, ProgramMeta
from .simulator import OutcomeDistribution


class VerdictKind(str, Enum):
    SURVIVED = "Survived"
    KILLED_WOO = "KilledWOO"
    KILLED_OPO = "KilledOPO"
    STILLBORN = "Stillborn"


class OpoTest(str, Enum):
    # Two-sample chi-square test of homogeneity between the two count vectors.
    HOMOGENEITY = "homogeneity"
    # One-sample goodness of fit against expected counts / shots.
    GOODNESS_OF_FIT = "goodness_of_fit"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    p_value: Optional[float] = None
    reason: Optional[str] = None

    @property
    def survived(self) -> bool:
        return self.kind is VerdictKind.SURVIVED


@dataclass(frozen=True)
class OracleConfig:
    alpha: float = 0.01
    dominance_tiebreak: str = "lexicographic"
    opo_test: OpoTest = OpoTest.HOMOGENEITY

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.dominance_tiebreak != "lexicographic":
            raise ValueError(f"unsupported tie-break rule {self.dominance_tiebreak!r}")
        object.__setattr__(self, "opo_test", OpoTest(self.opo_test))


@dataclass(frozen=True)
class OpoResult:
    killed: bool
    p_value: float
    statistic: float


def _check_widths(a: OutcomeDistribution, b: OutcomeDistribution) -> None:
    if a.width != b.width:
        raise ValueError(f"classical width mismatch: {a.width} vs {b.width}")


def dominant_output(d: OutcomeDistribution) -> str:
    """Most frequent outcome; ties go to the lexicographically smallest key."""
    if not d.counts:
        raise ValueError("empty distribution")
    return min(d.counts, key=lambda k: (-d.counts[k], k))


def woo_verdict(expected: OutcomeDistribution, observed: OutcomeDistribution, meta: ProgramMeta) -> bool:
    """True when the Wrong Output Oracle kills the mutant."""
    _check_widths(expected, observed)
    if meta.output_dominance is OutputDominance.OUTPUT_DOMINANT:
        return dominant_output(observed) != dominant_output(expected)
    return any(k not in expected.counts for k in observed.counts)


def chi2_sf(statistic: float, df: int) -> float:
    """Upper tail of the chi-square distribution (regularized upper incomplete gamma)."""
    if df <= 0:
        return 1.0
    return float(gammaincc(df / 2.0, statistic / 2.0))


def chi_square_statistic(expected_probs: Mapping[str, float], observed: OutcomeDistribution) -> float:
    extra = set(observed.counts) - set(expected_probs)
    if extra:
        raise ValueError(f"observed outcomes missing from expected: {sorted(extra)[:5]}")
    if any(p <= 0 for p in expected_probs.values()):
        raise ValueError("expected probabilities must be positive")
    total = sum(expected_probs.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"expected probabilities sum to {total}, not 1")
    n = observed.shots
    stat = 0.0
    for key in sorted(expected_probs):
        e = n * expected_probs[key] / total
        o = observed.counts.get(key, 0)
        stat += (o - e) ** 2 / e
    return stat


def chi_square_pvalue(expected_probs: Mapping[str, float], observed: OutcomeDistribution) -> float:
    """Goodness-of-fit p-value with df = (#expected keys - 1)."""
    stat = chi_square_statistic(expected_probs, observed)
    return chi2_sf(stat, len(expected_probs) - 1)


def homogeneity_test(expected: OutcomeDistribution, observed: OutcomeDistribution) -> tuple[float, float]:
    """Two-sample chi-square homogeneity test over the union of observed keys.

    Returns ``(statistic, p_value)`` with df = (#keys - 1).
    """
    _check_widths(expected, observed)
    keys = sorted(set(expected.counts) | set(observed.counts))
    n1, n2 = expected.shots, observed.shots
    n = n1 + n2
    stat = 0.0
    for k in keys:
        a, b = expected.counts.get(k, 0), observed.counts.get(k, 0)
        row = a + b
        e1, e2 = n1 * row / n, n2 * row / n
        stat += (a - e1) ** 2 / e1 + (b - e2) ** 2 / e2
    return stat, chi2_sf(stat, len(keys) - 1)


def opo_verdict(expected: OutcomeDistribution, observed: OutcomeDistribution,
                cfg: OracleConfig = OracleConfig()) -> OpoResult:
    _check_widths(expected, observed)
    if cfg.opo_test is OpoTest.HOMOGENEITY:
        stat, p = homogeneity_test(expected, observed)
    else:
        probs = expected.probabilities
        stat = chi_square_statistic(probs, observed)
        p = chi2_sf(stat, len(probs) - 1)
    return OpoResult(p < cfg.alpha, p, stat)


def judge(expected: OutcomeDistribution, observed: OutcomeDistribution, meta: ProgramMeta,
          cfg: OracleConfig = OracleConfig()) -> Verdict:
    if woo_verdict(expected, observed, meta):
        return Verdict(VerdictKind.KILLED_WOO)
    if meta.output_dominance is OutputDominance.DIVERSE_OUTPUT:
        res = opo_verdict(expected, observed, cfg)
        return Verdict(VerdictKind.KILLED_OPO if res.killed else VerdictKind.SURVIVED, res.p_value)
    return Verdict(VerdictKind.SURVIVED)
