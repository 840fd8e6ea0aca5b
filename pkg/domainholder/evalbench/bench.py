"""Score attribution techniques against a ground truth.

Results are read in the resolver's line-record format, so the output of any technique (including other tools, once
converted) can be scored and compared side by side.

"""


from collections import Counter
from dataclasses import dataclass
import json
import logging

from rich.console import Console
from rich.table import Table

from .. import constants
from ..constants import Method, Outcome
from ..exceptions import MissingTruth
from ..resolver.records import read_results
from .metrics import METRIC_NAMES, compute_metrics, judge, load_truth

_LOGGER = logging.getLogger(__name__)

#: Causes reported by :py:func:`failure_breakdown`, checked in this order against each unidentified result's flags
FAILURE_CAUSES = (
    ("invalid domain", (constants.FLAG_INVALID_DOMAIN,)),
    ("timed out", (constants.FLAG_TIMED_OUT,)),
    ("WHOIS redacted", (constants.FLAG_WHOIS_REDACTED,)),
    ("WHOIS absent", (constants.FLAG_WHOIS_ABSENT,)),
    ("WHOIS empty", (constants.FLAG_WHOIS_EMPTY,)),
    ("WHOIS failed", (constants.FLAG_WHOIS_FAILED + ":",)),
)

#: Policy stage failures reported alongside the WHOIS cause, by stage
POLICY_CAUSES = (
    ("no landing page", (constants.STAGE_RESOLVE_HOMEPAGE,)),
    ("no policy found", (constants.STAGE_FIND_LINKS, constants.STAGE_SEARCH_POLICY, constants.STAGE_FETCH_CANDIDATE)),
    ("request budget exhausted", (constants.STAGE_BUDGET,)),
    ("non-English policy", (constants.STAGE_DETECT_LANGUAGE,)),
    ("not a policy", (constants.STAGE_EXTRACT_TEXT, constants.STAGE_CLASSIFY)),
    ("no controller", (constants.STAGE_SELECT_PARAGRAPHS, constants.STAGE_EXTRACT_CONTROLLER)),
)


@dataclass(frozen=True)
class JudgedResult(object):
    """One result and its outcome."""

    domain: str
    organization: str
    expected_org: str
    outcome: Outcome


@dataclass(frozen=True)
class Evaluation(object):
    """The metrics of one technique and the per-domain outcomes they came from."""

    technique: str
    metrics: object
    judged: tuple

    def to_dict(self):
        """A JSON-compatible summary; percentages are strings to keep their two decimals."""
        percentages = self.metrics.percentages()
        return {
            "technique": self.technique,
            "tp": self.metrics.tp,
            "fp": self.metrics.fp,
            "fn": self.metrics.fn,
            "metrics": {name: str(value) if value is not None else None for name, value in percentages.items()},
            "outcomes": [
                {
                    "domain": item.domain,
                    "organization": item.organization,
                    "expected_org": item.expected_org,
                    "outcome": item.outcome.value,
                }
                for item in self.judged
            ],
        }


def lookup_truth(result, truth):
    """Find the ground truth of a result by its domain, then by its registrable domain."""
    entry = truth.get(result.input_fqdn.lower().rstrip("."))
    if entry is None and result.registrable_domain:
        entry = truth.get(result.registrable_domain.lower())
    return entry


def evaluate_results(results, truth, technique="domainholder", designators=None):
    """Judge results against a ground truth.

    Parameters
    ----------
    results : Sequence[AttributionResult]
        The results
    truth : dict
        ``domain -> GroundTruthEntry``
    technique : str
        The name of the technique
    designators : frozenset, None
        The legal designators to strip when comparing names

    Returns
    -------
    Evaluation
        The metrics and the per-domain outcomes

    Raises
    ------
    MissingTruth
        A result's domain has no ground truth
    AllZero
        There are no results

    """
    judged = []
    counts = Counter()
    for result in results:
        entry = lookup_truth(result, truth)
        if entry is None:
            raise MissingTruth("No ground truth for '{}'".format(result.input_fqdn))
        outcome = judge(result, entry, designators)
        counts[outcome] += 1
        judged.append(JudgedResult(result.input_fqdn, result.organization, entry.expected_org, outcome))

    metrics = compute_metrics(counts[Outcome.TP], counts[Outcome.FP], counts[Outcome.FN])
    _LOGGER.info("%s: TP=%d FP=%d FN=%d", technique, metrics.tp, metrics.fp, metrics.fn)
    return Evaluation(technique, metrics, tuple(judged))


def evaluate_technique(results_path, truth_path, technique=None, designators=None):
    """Score a results file against a ground-truth file.

    Parameters
    ----------
    results_path : str
        A file of line records
    truth_path : str
        A ``domain<TAB>expected_org[<TAB>notes]`` file
    technique : str, None
        The name of the technique; defaults to ``results_path``
    designators : frozenset, None
        The legal designators to strip when comparing names

    Returns
    -------
    Evaluation
        The metrics and the per-domain outcomes

    Raises
    ------
    FormatError
        A file can't be parsed
    MissingTruth
        A result's domain has no ground truth
    AllZero
        The results file is empty

    """
    return evaluate_results(
        read_results(results_path), load_truth(truth_path), technique or results_path, designators
    )


def compare_techniques(results_paths, truth_path, designators=None):
    """Score several results files against one ground truth.

    Parameters
    ----------
    results_paths : dict
        ``technique name -> results file``
    truth_path : str
        The ground-truth file
    designators : frozenset, None
        The legal designators to strip when comparing names

    Returns
    -------
    list[Evaluation]
        One evaluation per technique, in input order

    """
    truth = load_truth(truth_path)
    return [evaluate_results(read_results(path), truth, name, designators) for name, path in results_paths.items()]


def failure_breakdown(results):
    """Count the unidentified results by cause.

    Each unidentified result counts once for its WHOIS cause and once for the last policy stage that failed.

    Parameters
    ----------
    results : Iterable[AttributionResult]
        The results

    Returns
    -------
    Counter
        ``cause -> count``

    """
    breakdown = Counter()
    for result in results:
        if result.method is not Method.UNIDENTIFIED:
            continue

        for cause, prefixes in FAILURE_CAUSES:
            if any(flag.startswith(prefix) for flag in result.flags for prefix in prefixes):
                breakdown[cause] += 1
                break

        stages = [
            flag.partition(":")[2] for flag in result.flags if flag.startswith(constants.FLAG_POLICY_STAGE_FAILED + ":")
        ]
        for cause, cause_stages in reversed(POLICY_CAUSES):
            if any(stage in cause_stages for stage in stages):
                breakdown[cause] += 1
                break

        if constants.FLAG_CROSS_SLD_REDIRECT in result.flags:
            breakdown["cross-domain redirect"] += 1

    return breakdown


# ======================================================================= #
#                                                                         #
#                                Reporting                                #
#                                                                         #
# ======================================================================= #
def render_evaluations(evaluations, console=None):
    """Print one table row per technique.

    Parameters
    ----------
    evaluations : Iterable[Evaluation]
        The evaluations
    console : rich.console.Console, None
        Where to print; defaults to stdout

    """
    console = console or Console()
    table = Table(title="Attribution techniques", header_style="bold")
    table.add_column("Technique")
    for column in ("TP", "FP", "FN"):
        table.add_column(column, justify="right")
    for name in METRIC_NAMES:
        table.add_column("F1" if name == "f1" else name.capitalize(), justify="right")

    for evaluation in evaluations:
        percentages = evaluation.metrics.percentages()
        table.add_row(
            evaluation.technique,
            str(evaluation.metrics.tp),
            str(evaluation.metrics.fp),
            str(evaluation.metrics.fn),
            *("{}%".format(percentages[name]) if percentages[name] is not None else "n/a" for name in METRIC_NAMES)
        )

    console.print(table)


def render_breakdown(breakdown, console=None):
    """Print the unidentified-result causes."""
    console = console or Console()
    table = Table(title="Unidentified results by cause", header_style="bold")
    table.add_column("Cause")
    table.add_column("Results", justify="right")
    for cause, count in sorted(breakdown.items(), key=lambda item: (-item[1], item[0])):
        table.add_row(cause, str(count))
    console.print(table)


def write_summary(evaluations, path):
    """Write the evaluations to ``path`` as JSON."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump([evaluation.to_dict() for evaluation in evaluations], f, indent=2, sort_keys=True)
        f.write("\n")
    _LOGGER.debug("Wrote the evaluation summary to %s", path)
