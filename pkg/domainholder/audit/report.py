"""The third-party disclosure audit report.

"""


from collections import Counter, defaultdict
from dataclasses import dataclass, field
import json
import logging
import os

from rich.console import Console
from rich.table import Table

from ..constants import DisclosureStatus
from ..exceptions import EmptyDocument, InvalidDomain
from ..names.domain import registrable_domain
from ..policy.entities import disclosed_entities
from ..policy.text import extract_text, split_text
from .disclosure import OrgHierarchy, classify_disclosure, merge_spellings
from .flows import compute_coverage, recipients_per_app

_LOGGER = logging.getLogger(__name__)

POLICY_EXTENSIONS = (".html", ".htm", ".txt")


@dataclass(frozen=True)
class AppDisclosure(object):
    """The disclosure status of one app; organizations are head companies."""

    app_id: str
    received: frozenset
    disclosed: frozenset
    status: DisclosureStatus


@dataclass
class AuditReport(object):
    """Per-app disclosure statuses and the aggregate tables.

    ``org_disclosure`` maps each head company to ``[disclosed, undisclosed]`` app counts over the apps in ``apps``.

    """

    apps: list = field(default_factory=list)
    no_policy: list = field(default_factory=list)
    status_counts: dict = field(default_factory=dict)
    apps_per_data_type: dict = field(default_factory=dict)
    apps_per_domain: dict = field(default_factory=dict)
    apps_per_head: dict = field(default_factory=dict)
    org_disclosure: dict = field(default_factory=dict)
    data_type_matrix: dict = field(default_factory=dict)
    insecure_flows: int = 0
    insecure_apps: int = 0
    insecure_data_types: dict = field(default_factory=dict)
    coverage: object = None

    def to_dict(self):
        """A JSON-compatible summary."""
        return {
            "apps": [
                {
                    "app_id": app.app_id,
                    "received": sorted(app.received),
                    "disclosed": sorted(app.disclosed),
                    "status": app.status.value,
                }
                for app in self.apps
            ],
            "no_policy": list(self.no_policy),
            "status_counts": dict(self.status_counts),
            "apps_per_data_type": dict(self.apps_per_data_type),
            "apps_per_domain": dict(self.apps_per_domain),
            "apps_per_head": dict(self.apps_per_head),
            "org_disclosure": {org: list(counts) for org, counts in self.org_disclosure.items()},
            "data_type_matrix": {domain: dict(types) for domain, types in self.data_type_matrix.items()},
            "insecure": {
                "flows": self.insecure_flows,
                "apps": self.insecure_apps,
                "data_types": dict(self.insecure_data_types),
            },
            "coverage": None
            if self.coverage is None
            else {
                "flows": self.coverage.flows,
                "attributed_flows": self.coverage.attributed_flows,
                "destinations": self.coverage.destinations,
                "attributed_destinations": self.coverage.attributed_destinations,
            },
        }


def load_policies(directory):
    """Load one policy per app from ``<app_id>.html`` or ``<app_id>.txt`` files.

    HTML files go through text extraction; text files are split into paragraphs at blank lines.  Files without any
    text are logged and left out.

    Returns
    -------
    dict
        ``app_id -> PolicyText``

    """
    policies = {}
    for filename in sorted(os.listdir(directory)):
        app_id, extension = os.path.splitext(filename)
        if extension.lower() not in POLICY_EXTENSIONS:
            continue

        path = os.path.join(directory, filename)
        with open(path, "rb") as f:
            data = f.read()

        try:
            if extension.lower() == ".txt":
                policies[app_id] = split_text(data.decode("utf-8", errors="replace"), path)
            else:
                policies[app_id] = extract_text(data, path)
        except EmptyDocument as exc:
            _LOGGER.warning("Skipping policy: %s", exc)

    return policies


def _domain_of(flow, resolutions):
    result = resolutions.get(flow.destination.text)
    if result is not None and result.registrable_domain:
        return result.registrable_domain
    try:
        return registrable_domain(flow.destination).text
    except InvalidDomain:
        return flow.destination.text


def build_report(flows, resolutions, policies, relations=(), designators=None, entity_rules=None):
    """Audit the third-party disclosures of every app.

    Parameters
    ----------
    flows : Sequence[FlowRecord]
        The flows
    resolutions : dict
        ``destination fqdn -> AttributionResult``
    policies : dict
        ``app_id -> PolicyText``; apps without a policy go to the ``no_policy`` bucket
    relations : Iterable[OrgRelation], OrgHierarchy
        The parent relations
    designators : frozenset, None
        The legal designators to strip when matching names; ignored if ``relations`` is an ``OrgHierarchy``
    entity_rules : EntityRules, None
        The rules for finding the organizations a policy names; defaults to the bundled ones

    Returns
    -------
    AuditReport
        The report

    Raises
    ------
    MissingResolution
        A destination has no resolution
    CycleDetected, AmbiguousParent
        The relations are inconsistent

    """
    flows = list(flows)
    hierarchy = relations if isinstance(relations, OrgHierarchy) else OrgHierarchy(relations, designators)
    report = AuditReport()
    if not flows:
        return report

    recipients = recipients_per_app(flows, resolutions, hierarchy.designators)
    report.coverage = compute_coverage(flows, resolutions)

    # aggregates over every app with flows
    types_by_app = defaultdict(set)
    domains_by_app = defaultdict(set)
    matrix = defaultdict(Counter)
    insecure_apps = set()
    insecure_types = Counter()
    for flow in flows:
        domain = _domain_of(flow, resolutions)
        types_by_app[flow.app_id].update(flow.data_types)
        domains_by_app[flow.app_id].add(domain)
        matrix[domain].update(flow.data_types)
        if flow.insecure:
            report.insecure_flows += 1
            insecure_apps.add(flow.app_id)
            insecure_types.update(flow.data_types)

    report.insecure_apps = len(insecure_apps)
    report.insecure_data_types = dict(sorted(insecure_types.items()))
    report.data_type_matrix = {domain: dict(sorted(matrix[domain].items())) for domain in sorted(matrix)}
    report.apps_per_data_type = dict(sorted(Counter(t for types in types_by_app.values() for t in types).items()))
    report.apps_per_domain = dict(sorted(Counter(d for domains in domains_by_app.values() for d in domains).items()))

    heads_by_app = {app_id: {hierarchy.head(org) for org in orgs} for app_id, orgs in recipients.items()}
    display = merge_spellings(
        (head for app_id in sorted(heads_by_app) for head in sorted(heads_by_app[app_id])), hierarchy.designators
    )
    heads_by_app = {app_id: {display[head] for head in heads} for app_id, heads in heads_by_app.items()}
    report.apps_per_head = dict(sorted(Counter(h for heads in heads_by_app.values() for h in heads).items()))

    # disclosure statuses over the apps that have a policy
    statuses = Counter()
    org_disclosure = defaultdict(lambda: [0, 0])
    for app_id in sorted(recipients):
        policy = policies.get(app_id)
        if policy is None:
            report.no_policy.append(app_id)
            continue

        disclosed = {hierarchy.head(org) for org in disclosed_entities(policy, entity_rules)}
        received = heads_by_app[app_id]
        status = classify_disclosure(received, disclosed, hierarchy)
        statuses[status] += 1
        report.apps.append(AppDisclosure(app_id, frozenset(received), frozenset(disclosed), status))

        for head in received:
            named = classify_disclosure({head}, disclosed, hierarchy) is DisclosureStatus.FULL
            org_disclosure[head][0 if named else 1] += 1

    report.status_counts = {status.value: statuses[status] for status in DisclosureStatus}
    report.org_disclosure = {org: tuple(counts) for org, counts in sorted(org_disclosure.items())}
    _LOGGER.info(
        "Audited %d apps (%d without a policy): %s", len(report.apps), len(report.no_policy), report.status_counts
    )
    return report


# ======================================================================= #
#                                                                         #
#                                Rendering                                #
#                                                                         #
# ======================================================================= #
def _counts_table(title, label, counts):
    table = Table(title=title, header_style="bold")
    table.add_column(label)
    table.add_column("Apps", justify="right")
    for key, count in sorted(counts.items(), key=lambda item: (-item[1], item[0])):
        table.add_row(key, str(count))
    return table


def render_report(report, console=None):
    """Print the report's tables.

    Parameters
    ----------
    report : AuditReport
        The report
    console : rich.console.Console, None
        Where to print; defaults to stdout

    """
    console = console or Console()

    table = Table(title="Disclosure status", header_style="bold")
    table.add_column("Status")
    table.add_column("Apps", justify="right")
    for status, count in report.status_counts.items():
        table.add_row(status, str(count))
    table.add_row("no policy found", str(len(report.no_policy)))
    console.print(table)

    console.print(_counts_table("Apps per data type", "Data type", report.apps_per_data_type))
    console.print(_counts_table("Apps per destination domain", "Domain", report.apps_per_domain))
    console.print(_counts_table("Apps per head company", "Organization", report.apps_per_head))

    table = Table(title="Third-party disclosure by organization", header_style="bold")
    table.add_column("Organization")
    table.add_column("Disclosed", justify="right")
    table.add_column("Undisclosed", justify="right")
    for org, (named, unnamed) in report.org_disclosure.items():
        table.add_row(org, str(named), str(unnamed))
    console.print(table)

    if report.coverage is not None:
        console.print(
            "Attributed {} of {} flows and {} of {} destinations; {} flows over plain HTTP from {} apps".format(
                report.coverage.attributed_flows,
                report.coverage.flows,
                report.coverage.attributed_destinations,
                report.coverage.destinations,
                report.insecure_flows,
                report.insecure_apps,
            )
        )


def write_report(report, path):
    """Write the report to ``path`` as JSON."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
