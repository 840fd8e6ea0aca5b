"""Personal-data flow logs and the organizations receiving them.

A flow log has one record per line::

    app_id<TAB>destination_fqdn<TAB>transport<TAB>comma-separated data types

"""


from dataclasses import dataclass
import logging

from ..exceptions import FormatError, InvalidDomain, MissingResolution
from ..names.domain import parse_fqdn
from .disclosure import merge_spellings

_LOGGER = logging.getLogger(__name__)

TRANSPORTS = ("https", "http")


@dataclass(frozen=True)
class FlowRecord(object):
    """Personal data sent by an app to a destination."""

    app_id: str
    destination: object
    data_types: tuple
    transport: str

    def __post_init__(self):
        if not self.app_id:
            raise ValueError("A flow needs an app ID")
        if not self.data_types:
            raise ValueError("A flow needs at least one data type")
        if self.transport not in TRANSPORTS:
            raise ValueError("Transport must be 'https' or 'http', not '{}'".format(self.transport))

    @property
    def insecure(self):
        """Whether the data was sent over plain HTTP."""
        return self.transport == "http"


@dataclass(frozen=True)
class CoverageStats(object):
    """How many flows and destinations have an attributed organization."""

    flows: int
    attributed_flows: int
    destinations: int
    attributed_destinations: int

    @property
    def unattributed_flows(self):
        """The flows whose destination is unidentified."""
        return self.flows - self.attributed_flows


def parse_flow(line, path=None, line_number=None):
    """Parse one flow log line.

    Raises
    ------
    FormatError
        The line is malformed

    """
    fields = line.rstrip("\r\n").split("\t")
    if len(fields) != 4:
        raise FormatError("expected 4 tab-separated fields, got {}".format(len(fields)), path, line_number)

    app_id, destination, transport, data_types = (field.strip() for field in fields)
    try:
        fqdn = parse_fqdn(destination)
    except InvalidDomain as exc:
        raise FormatError("invalid destination: {}".format(exc), path, line_number) from exc

    types = tuple(data_type.strip() for data_type in data_types.split(",") if data_type.strip())
    try:
        return FlowRecord(app_id, fqdn, types, transport.lower())
    except ValueError as exc:
        raise FormatError(str(exc), path, line_number) from exc


def ingest_flows(path, strict=False):
    """Read a flow log.

    Parameters
    ----------
    path : str
        The flow log
    strict : bool
        If ``True``, a malformed line aborts the import; otherwise it is logged and skipped

    Returns
    -------
    list[FlowRecord]
        The valid records in file order

    Raises
    ------
    FormatError
        A line is malformed and ``strict`` is ``True``

    """
    flows = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip() or line.startswith("#"):
                continue
            try:
                flows.append(parse_flow(line, path, line_number))
            except FormatError as exc:
                if strict:
                    raise
                _LOGGER.warning("Skipping flow: %s", exc)

    _LOGGER.debug("Read %d flows from %s", len(flows), path)
    return flows


def _resolution(flow, resolutions):
    result = resolutions.get(flow.destination.text)
    if result is None:
        raise MissingResolution("No resolution for destination '{}'".format(flow.destination.text))
    return result


def recipients_per_app(flows, resolutions, designators=None):
    """Collect the organizations receiving each app's data.

    Parameters
    ----------
    flows : Iterable[FlowRecord]
        The flows
    resolutions : dict
        ``destination fqdn -> AttributionResult``
    designators : frozenset, None
        The legal designators to strip when merging spellings of one organization

    Returns
    -------
    dict
        ``app_id -> set of organization names``; unidentified destinations are left out, so an app may map to an empty
        set.  Spellings with the same normalized form are merged into the first one seen in ``flows``.

    Raises
    ------
    MissingResolution
        A destination has no resolution

    """
    flows = list(flows)
    organizations = [_resolution(flow, resolutions).organization for flow in flows]
    display = merge_spellings((org for org in organizations if org is not None), designators)

    recipients = {}
    for flow, org in zip(flows, organizations):
        orgs = recipients.setdefault(flow.app_id, set())
        if org is not None:
            orgs.add(display[org])
    return recipients


def compute_coverage(flows, resolutions):
    """Count the flows and unique destinations with an attributed organization.

    Raises
    ------
    MissingResolution
        A destination has no resolution

    """
    flows = list(flows)
    attributed_flows = 0
    destinations = {}
    for flow in flows:
        attributed = _resolution(flow, resolutions).organization is not None
        attributed_flows += attributed
        destinations[flow.destination.text] = attributed

    return CoverageStats(len(flows), attributed_flows, len(destinations), sum(destinations.values()))
