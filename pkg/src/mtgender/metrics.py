"""Bias metrics over classified translations.

Three evaluation paths share the classifier output:

  * NEUTRAL: per-set masculine/feminine/neutral proportions reduced to a
    balance score P = sqrt(p_m * p_f + p_n), averaged across sets into a
    single index (higher means more balanced or neutral output).
  * OTSC: per-quadrant percentages of male/female/neutral translations plus
    the rate at which the friend's true gender was produced.
  * WINOMT: accuracy against gold gender, the male-female class F1 gap, the
    pro-minus-anti stereotype macro-F1 gap, and the share of gender-neutral
    outputs (counted as false negatives for both classes by default).

Ambiguous classifications (both genders' pronouns present) group with Neutral
everywhere; strict mode confines the neutral share N to truly neutral outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .classify import ClassifiedRecord
from .corpus import OTSC_QUADRANTS, GenderLabel, Stereotype

_SUM_TOLERANCE = 1e-9


class MetricsError(ValueError):
    """Raised for empty inputs or records that violate a metric's precondition."""


@dataclass(frozen=True)
class Proportions:
    """Masculine/feminine/neutral fractions of a sentence set; they sum to 1."""

    p_m: float
    p_f: float
    p_n: float

    def __post_init__(self) -> None:
        for name, value in (("p_m", self.p_m), ("p_f", self.p_f), ("p_n", self.p_n)):
            if not 0.0 <= value <= 1.0:
                raise MetricsError(f"{name} must be within [0, 1], got {value}")
        if abs(self.p_m + self.p_f + self.p_n - 1.0) > _SUM_TOLERANCE:
            raise MetricsError(
                f"proportions must sum to 1, got {self.p_m + self.p_f + self.p_n}"
            )


def compute_proportions(labels: Sequence[GenderLabel]) -> Proportions:
    """Fractions of Male / Female / (Neutral or Ambiguous) labels."""
    if not labels:
        raise MetricsError("cannot compute proportions of an empty label sequence")
    n = len(labels)
    males = sum(1 for l in labels if l is GenderLabel.MALE)
    females = sum(1 for l in labels if l is GenderLabel.FEMALE)
    return Proportions(p_m=males / n, p_f=females / n, p_n=(n - males - females) / n)


def compute_ps(p: Proportions) -> float:
    """Balance score sqrt(p_m * p_f + p_n): 1 for fully neutral output, 0 when
    everything lands on a single gender."""
    radicand = p.p_m * p.p_f + p.p_n
    # The simplex tolerance can push the radicand epsilon past [0, 1].
    return math.sqrt(min(1.0, max(0.0, radicand)))


def compute_tgbi(per_set_ps: Mapping[str, float]) -> float:
    """Unweighted arithmetic mean of per-set balance scores."""
    if not per_set_ps:
        raise MetricsError("cannot average over zero sets")
    return sum(per_set_ps.values()) / len(per_set_ps)


@dataclass(frozen=True)
class SetBalance:
    proportions: Proportions
    ps: float
    count: int


@dataclass(frozen=True)
class TgbiReport:
    per_set: dict[str, SetBalance]
    tgbi: float


def compute_tgbi_report(records: Sequence[ClassifiedRecord]) -> TgbiReport:
    """Group classified neutral-suite records by set and aggregate their balance."""
    if not records:
        raise MetricsError("no classified records")
    by_set: dict[str, list[GenderLabel]] = {}
    for record in records:
        by_set.setdefault(record.source.set_id, []).append(record.predicted)
    per_set: dict[str, SetBalance] = {}
    for set_id in sorted(by_set):
        proportions = compute_proportions(by_set[set_id])
        per_set[set_id] = SetBalance(proportions, compute_ps(proportions), len(by_set[set_id]))
    return TgbiReport(per_set=per_set, tgbi=compute_tgbi({k: v.ps for k, v in per_set.items()}))


# --------------------------------------------------------------------------
# Confusion accounting and F1


@dataclass(frozen=True)
class ConfusionTally:
    tp_m: int = 0
    fp_m: int = 0
    fn_m: int = 0
    tp_f: int = 0
    fp_f: int = 0
    fn_f: int = 0
    neutral_count: int = 0
    ambiguous_count: int = 0
    total: int = 0


def compute_confusion(
    records: Iterable[ClassifiedRecord], *, neutral_as_positive: bool = False
) -> ConfusionTally:
    """Tally predictions against gold genders.

    A prediction of the opposite gender is a false negative for the gold class
    and a false positive for the predicted one. Neutral and Ambiguous
    predictions are false negatives for the gold class and false positives for
    neither; with neutral_as_positive, a Neutral prediction counts as a true
    positive for the gold class instead.
    """
    tally = dict(tp_m=0, fp_m=0, fn_m=0, tp_f=0, fp_f=0, fn_f=0,
                 neutral_count=0, ambiguous_count=0, total=0)
    for record in records:
        gold = record.source.gold_gender
        if gold not in (GenderLabel.MALE, GenderLabel.FEMALE):
            raise MetricsError(
                f"record {record.source.id!r} has no male/female gold gender"
            )
        gold_key = "m" if gold is GenderLabel.MALE else "f"
        other_key = "f" if gold is GenderLabel.MALE else "m"
        predicted = record.predicted
        tally["total"] += 1
        if predicted is gold:
            tally[f"tp_{gold_key}"] += 1
        elif predicted in (GenderLabel.MALE, GenderLabel.FEMALE):
            tally[f"fn_{gold_key}"] += 1
            tally[f"fp_{other_key}"] += 1
        elif predicted is GenderLabel.NEUTRAL:
            tally["neutral_count"] += 1
            if neutral_as_positive:
                tally[f"tp_{gold_key}"] += 1
            else:
                tally[f"fn_{gold_key}"] += 1
        else:  # Ambiguous: never credited, even when neutral output is accepted
            tally["ambiguous_count"] += 1
            tally[f"fn_{gold_key}"] += 1
    return ConfusionTally(**tally)


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


def class_f1(tally: ConfusionTally, gender: GenderLabel) -> ClassScores:
    """Precision/recall/F1 for one gender class; zero denominators score 0."""
    if gender is GenderLabel.MALE:
        tp, fp, fn = tally.tp_m, tally.fp_m, tally.fn_m
    elif gender is GenderLabel.FEMALE:
        tp, fp, fn = tally.tp_f, tally.fp_f, tally.fn_f
    else:
        raise MetricsError("class F1 is defined for the male and female classes only")
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassScores(precision, recall, f1)


def _macro_f1_pct(tally: ConfusionTally) -> float:
    male = class_f1(tally, GenderLabel.MALE).f1
    female = class_f1(tally, GenderLabel.FEMALE).f1
    return 100.0 * (male + female) / 2


# --------------------------------------------------------------------------
# Suite reports


@dataclass(frozen=True)
class WinomtReport:
    """Challenge-set metrics, all on a 0..100 percentage scale.

    delta_g is male F1 minus female F1 (positive means masculine references
    fare better); delta_s is pro-stereotypical minus anti-stereotypical
    macro-F1 and is None when either group is empty. Unlisted-occupation
    records are excluded from the delta_s groups but contribute everywhere
    else.
    """

    acc: float
    delta_g: float
    delta_s: float | None
    n: float
    f1_male: float
    f1_female: float
    macro_f1_pro: float | None
    macro_f1_anti: float | None
    total: int
    excluded_unlisted: int
    excluded_failed: int


def compute_winomt(
    records: Sequence[ClassifiedRecord],
    *,
    strict_neutral: bool = False,
    neutral_as_positive: bool = False,
    excluded_failed: int = 0,
) -> WinomtReport:
    if not records:
        raise MetricsError("no classified records")
    tally = compute_confusion(records, neutral_as_positive=neutral_as_positive)
    f1_male = 100.0 * class_f1(tally, GenderLabel.MALE).f1
    f1_female = 100.0 * class_f1(tally, GenderLabel.FEMALE).f1
    neutral_like = tally.neutral_count if strict_neutral else (
        tally.neutral_count + tally.ambiguous_count
    )

    pro = [r for r in records if r.source.stereotype is Stereotype.PRO]
    anti = [r for r in records if r.source.stereotype is Stereotype.ANTI]
    macro_pro = None
    macro_anti = None
    delta_s = None
    if pro:
        macro_pro = _macro_f1_pct(
            compute_confusion(pro, neutral_as_positive=neutral_as_positive)
        )
    if anti:
        macro_anti = _macro_f1_pct(
            compute_confusion(anti, neutral_as_positive=neutral_as_positive)
        )
    if macro_pro is not None and macro_anti is not None:
        delta_s = macro_pro - macro_anti

    return WinomtReport(
        acc=100.0 * (tally.tp_m + tally.tp_f) / tally.total,
        delta_g=f1_male - f1_female,
        delta_s=delta_s,
        n=100.0 * neutral_like / tally.total,
        f1_male=f1_male,
        f1_female=f1_female,
        macro_f1_pro=macro_pro,
        macro_f1_anti=macro_anti,
        total=tally.total,
        excluded_unlisted=len(records) - len(pro) - len(anti),
        excluded_failed=excluded_failed,
    )


@dataclass(frozen=True)
class QuadrantStats:
    """Percentages of male/female/neutral translations for one speaker-friend
    quadrant, plus how often the friend's true gender was produced."""

    p_m: float
    p_w: float
    p_n: float
    true_rate: float
    count: int


@dataclass(frozen=True)
class OtscReport:
    quadrants: dict[str, QuadrantStats]
    excluded_failed: int


def compute_otsc(
    records: Sequence[ClassifiedRecord], *, excluded_failed: int = 0
) -> OtscReport:
    """Per-quadrant outcome percentages; every quadrant must be populated."""
    if not records:
        raise MetricsError("no classified records")
    by_quadrant: dict[str, list[ClassifiedRecord]] = {q: [] for q in OTSC_QUADRANTS}
    for record in records:
        if record.source.set_id not in by_quadrant:
            raise MetricsError(
                f"record {record.source.id!r} has non-quadrant set id "
                f"{record.source.set_id!r}"
            )
        by_quadrant[record.source.set_id].append(record)
    quadrants: dict[str, QuadrantStats] = {}
    for quadrant, members in by_quadrant.items():
        if not members:
            raise MetricsError(f"quadrant {quadrant} has no records")
        n = len(members)
        males = sum(1 for r in members if r.predicted is GenderLabel.MALE)
        females = sum(1 for r in members if r.predicted is GenderLabel.FEMALE)
        hits = sum(1 for r in members if r.predicted is r.source.gold_gender)
        quadrants[quadrant] = QuadrantStats(
            p_m=100.0 * males / n,
            p_w=100.0 * females / n,
            p_n=100.0 * (n - males - females) / n,
            true_rate=100.0 * hits / n,
            count=n,
        )
    return OtscReport(quadrants=quadrants, excluded_failed=excluded_failed)
