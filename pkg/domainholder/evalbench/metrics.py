"""Outcome judging and metric arithmetic.

Every domain has some holder, so a result is a true positive (right organization), a false positive (wrong
organization) or a false negative (no organization); there are no true negatives.

"""


from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
import logging

from ..constants import Outcome
from ..exceptions import AllZero, EmptyAfterNormalization, FormatError, MissingTruth
from ..names.org import same_organization

_LOGGER = logging.getLogger(__name__)

#: Metrics reported by :py:meth:`EvalMetrics.percentages`, in table order
METRIC_NAMES = ("accuracy", "precision", "recall", "f1")

_HUNDREDTH = Decimal("0.01")


@dataclass(frozen=True)
class GroundTruthEntry(object):
    """The organization known to hold a domain."""

    domain: str
    expected_org: str
    notes: str = None

    def __post_init__(self):
        if not self.expected_org or not self.expected_org.strip():
            raise ValueError("The expected organization of {} is empty".format(self.domain))


@dataclass(frozen=True)
class EvalMetrics(object):
    """Outcome counts and the exact metrics derived from them.

    Ratios are :py:class:`fractions.Fraction` values, or ``None`` when their denominator is zero.

    """

    tp: int
    fp: int
    fn: int

    @property
    def total(self):
        """The number of judged results."""
        return self.tp + self.fp + self.fn

    @property
    def accuracy(self):
        """``tp / (tp + fp + fn)``."""
        return Fraction(self.tp, self.total) if self.total else None

    @property
    def precision(self):
        """``tp / (tp + fp)``."""
        return Fraction(self.tp, self.tp + self.fp) if self.tp + self.fp else None

    @property
    def recall(self):
        """``tp / (tp + fn)``."""
        return Fraction(self.tp, self.tp + self.fn) if self.tp + self.fn else None

    @property
    def f1(self):
        """The harmonic mean of precision and recall; 0 when both are 0."""
        precision, recall = self.precision, self.recall
        if precision is None or recall is None:
            return None
        if precision + recall == 0:
            return Fraction(0)
        return 2 * precision * recall / (precision + recall)

    def percentages(self):
        """The metrics as percentages rounded half-up to two decimals.

        Returns
        -------
        dict
            ``name -> Decimal`` (or ``None`` when undefined) for each of :py:const:`METRIC_NAMES`

        """
        return {name: to_percent(getattr(self, name)) for name in METRIC_NAMES}


def to_percent(ratio):
    """Convert a ratio to a percentage rounded half-up to two decimals.

    Parameters
    ----------
    ratio : Fraction, None
        The ratio

    Returns
    -------
    Decimal, None
        The percentage, e.g. ``Decimal("95.71")``

    """
    if ratio is None:
        return None
    ratio = Fraction(ratio)
    return (Decimal(ratio.numerator * 100) / Decimal(ratio.denominator)).quantize(_HUNDREDTH, rounding=ROUND_HALF_UP)


def compute_metrics(tp, fp, fn):
    """Compute accuracy, precision, recall and F1 from outcome counts.

    Parameters
    ----------
    tp : int
        True positives
    fp : int
        False positives
    fn : int
        False negatives

    Returns
    -------
    EvalMetrics
        The metrics

    Raises
    ------
    AllZero
        All counts are zero
    ValueError
        A count is negative

    """
    if min(tp, fp, fn) < 0:
        raise ValueError("Outcome counts must not be negative")
    if tp == fp == fn == 0:
        raise AllZero("There are no outcomes to compute metrics from")
    return EvalMetrics(tp, fp, fn)


def judge(result, truth, designators=None):
    """Judge one attribution against the ground truth.

    Parameters
    ----------
    result : AttributionResult, str, None
        The attribution, or just the attributed organization (``None`` if there is none)
    truth : GroundTruthEntry, None
        The ground truth for the domain
    designators : frozenset, None
        The legal designators to strip when comparing names; defaults to the bundled gazetteer

    Returns
    -------
    Outcome
        ``FN`` without an organization, ``TP`` if it matches the expected one and ``FP`` otherwise

    Raises
    ------
    MissingTruth
        ``truth`` is ``None``

    """
    if truth is None:
        raise MissingTruth("There is no ground truth for this result")

    organization = getattr(result, "organization", result)
    if organization is None:
        return Outcome.FN

    try:
        return Outcome.TP if same_organization(organization, truth.expected_org, designators) else Outcome.FP
    except EmptyAfterNormalization:
        _LOGGER.debug("'%s' is not comparable to '%s'", organization, truth.expected_org)
        return Outcome.FP


def load_truth(path):
    """Read a ground-truth file.

    Each line is ``domain<TAB>expected_org[<TAB>notes]``; blank lines and ``#`` comments are skipped.

    Returns
    -------
    dict
        ``domain -> GroundTruthEntry``, domains lowercased

    Raises
    ------
    FormatError
        A line is malformed or a domain is listed twice

    """
    truth = {}
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue

            fields = line.split("\t")
            if len(fields) not in (2, 3) or not fields[0].strip():
                raise FormatError("expected 'domain<TAB>expected_org[<TAB>notes]'", path, line_number)

            domain = fields[0].strip().lower().rstrip(".")
            if domain in truth:
                raise FormatError("duplicate entry for '{}'".format(domain), path, line_number)

            try:
                truth[domain] = GroundTruthEntry(domain, fields[1].strip(), fields[2].strip() if len(fields) == 3 else None)
            except ValueError as exc:
                raise FormatError(str(exc), path, line_number) from exc

    return truth
