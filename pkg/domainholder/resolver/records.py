"""Line records for attribution results.

Each result is written as one JSON object per line with sorted keys::

    {"evidence": ..., "flags": [...], "fqdn": ..., "method": ..., "organization": ..., "registrable_domain": ...}

The same format is read back by the evaluation bench, so output files from other attribution tools can be scored once
they are converted to it.

"""


import json
import logging

from ..constants import Method
from ..exceptions import FormatError
from .resolver_sync import AttributionResult

_LOGGER = logging.getLogger(__name__)

RECORD_FIELDS = ("evidence", "flags", "fqdn", "method", "organization", "registrable_domain")


def result_to_record(result):
    """Convert an :py:class:`~domainholder.resolver.resolver_sync.AttributionResult` to a JSON-compatible dict."""
    return {
        "evidence": result.evidence,
        "flags": sorted(result.flags),
        "fqdn": result.input_fqdn,
        "method": result.method.value,
        "organization": result.organization,
        "registrable_domain": result.registrable_domain,
    }


def format_record(result):
    """Serialize a result as a single line (without the newline)."""
    return json.dumps(result_to_record(result), sort_keys=True, ensure_ascii=False)


def write_results(results, f):
    """Write results to an open text file, one per line."""
    for result in results:
        f.write(format_record(result) + "\n")


def parse_record(line, path=None, line_number=None):
    """Parse one record line.

    Parameters
    ----------
    line : str
        The JSON line
    path : str, None
        The file being parsed, for error messages
    line_number : int, None
        The line number, for error messages

    Returns
    -------
    AttributionResult
        The result, without a certificate note

    Raises
    ------
    FormatError
        The line is not a valid record

    """
    try:
        data = json.loads(line)
    except ValueError as exc:
        raise FormatError("not valid JSON", path, line_number) from exc

    if not isinstance(data, dict):
        raise FormatError("a record must be a JSON object", path, line_number)

    fqdn = data.get("fqdn")
    if not isinstance(fqdn, str) or not fqdn:
        raise FormatError("missing 'fqdn'", path, line_number)

    try:
        method = Method(data.get("method"))
    except ValueError as exc:
        raise FormatError("unknown method {!r}".format(data.get("method")), path, line_number) from exc

    organization = data.get("organization")
    if organization is not None and not isinstance(organization, str):
        raise FormatError("'organization' must be a string or null", path, line_number)
    if (method is Method.UNIDENTIFIED) != (organization is None):
        raise FormatError("'organization' must be null exactly when the method is 'unidentified'", path, line_number)

    flags = data.get("flags") or []
    if not isinstance(flags, list) or not all(isinstance(flag, str) for flag in flags):
        raise FormatError("'flags' must be a list of strings", path, line_number)

    return AttributionResult(
        fqdn,
        data.get("registrable_domain"),
        organization,
        method,
        data.get("evidence"),
        tuple(sorted(flags)),
    )


def read_results(path):
    """Read a results file written by :py:func:`write_results`.

    Blank lines are ignored.

    Raises
    ------
    FormatError
        A line is not a valid record

    """
    results = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if not line.strip():
                continue
            results.append(parse_record(line, path, line_number))

    _LOGGER.debug("Read %d results from %s", len(results), path)
    return results
