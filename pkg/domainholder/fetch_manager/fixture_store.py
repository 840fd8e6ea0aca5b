"""Record and replay every network transaction.

Every HTTP, WHOIS, TLS and web-search transaction goes through :py:meth:`FixtureStore.transact`.  In ``record`` mode the
live response is archived, in ``replay`` mode it is read back from the archive without touching the network, and in
``live`` mode the archive is bypassed (an optional :py:class:`~domainholder.fetch_manager.evidence_cache.EvidenceCache`
may answer instead).

The archive is a directory holding one file per transaction plus an index file with one record per line::

    <key>\\t<kind>\\t<path>\\t<timestamp>[\\t<sha256>]

HTTP responses are stored verbatim (status line, headers, blank line, body), WHOIS responses as text, TLS leaf
certificates as DER and search results as JSON.  A transaction that failed while recording is stored as an ``.err``
file and raised again on replay.

"""


from dataclasses import dataclass
from datetime import datetime, timezone
import hashlib
import http
import json
import logging
import os
import threading
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

from .. import constants, exceptions
from ..constants import FixtureMode, TransactionKind
from ..exceptions import ArchiveCorrupt, ConfigError, DomainHolderError, ReplayMiss

_LOGGER = logging.getLogger(__name__)

DEFAULT_PORTS = {"http": 80, "https": 443}


@dataclass(frozen=True)
class Descriptor(object):
    """A normalized description of one network transaction.

    ``domain`` is the registrable domain the transaction concerns, if known; it is not part of the key.

    """

    kind: TransactionKind
    key: str
    domain: str = None


@dataclass(frozen=True)
class HttpResponse(object):
    """A single HTTP response, without following redirects."""

    status_code: int
    headers: tuple
    body: bytes

    def header(self, name, default=None):
        """Get a header value, matching ``name`` case-insensitively."""
        name = name.lower()
        for key, value in self.headers:
            if key.lower() == name:
                return value
        return default


@dataclass(frozen=True)
class IndexEntry(object):
    """One line of the archive index."""

    key: str
    kind: TransactionKind
    path: str
    timestamp: str
    digest: str = None


# ======================================================================= #
#                                                                         #
#                          Descriptor normalization                       #
#                                                                         #
# ======================================================================= #
def normalize_url(url):
    """Normalize a URL so that equivalent requests share one archive key.

    The scheme and host are lowercased, default ports and fragments are dropped, an empty path becomes ``/`` and the
    query parameters are sorted.

    Parameters
    ----------
    url : str
        An absolute URL

    Returns
    -------
    str
        The normalized URL

    """
    parts = urlsplit(url.strip())
    scheme = parts.scheme.lower()
    netloc = (parts.hostname or "").lower()
    if parts.port and parts.port != DEFAULT_PORTS.get(scheme):
        netloc = "{}:{}".format(netloc, parts.port)
    query = urlencode(sorted(parse_qsl(parts.query, keep_blank_values=True)))
    return urlunsplit((scheme, netloc, parts.path or "/", query, ""))


def http_descriptor(url, method="GET", domain=None):
    """Describe an HTTP request."""
    return Descriptor(TransactionKind.HTTP, "http {} {}".format(method.upper(), normalize_url(url)), domain)


def whois_descriptor(server, query, domain=None):
    """Describe a WHOIS query sent to ``server``."""
    return Descriptor(TransactionKind.WHOIS, "whois {} {}".format(server.lower(), query.strip().lower()), domain)


def tls_descriptor(host, port=constants.TLS_PORT, domain=None):
    """Describe a TLS handshake with ``host``."""
    return Descriptor(TransactionKind.TLS, "tls {}:{}".format(host.lower(), port), domain)


def search_descriptor(provider_id, query):
    """Describe a web search."""
    return Descriptor(TransactionKind.SEARCH, "search {} {}".format(provider_id, " ".join(query.casefold().split())))


# ======================================================================= #
#                                                                         #
#                            Payload encoding                             #
#                                                                         #
# ======================================================================= #
def encode_payload(kind, payload):
    """Serialize a transaction payload to the bytes stored in the archive.

    Parameters
    ----------
    kind : TransactionKind
        The kind of transaction
    payload : HttpResponse, str, bytes, list
        The response: an :py:class:`HttpResponse`, WHOIS text, DER bytes or a list of search result URLs

    Returns
    -------
    bytes
        The stored form

    """
    if kind is TransactionKind.HTTP:
        try:
            reason = http.HTTPStatus(payload.status_code).phrase
        except ValueError:
            reason = ""
        lines = ["HTTP/1.1 {} {}".format(payload.status_code, reason).rstrip()]
        lines.extend("{}: {}".format(key, value) for key, value in payload.headers)
        return ("\n".join(lines) + "\n\n").encode("latin-1", "replace") + payload.body

    if kind is TransactionKind.WHOIS:
        return payload.encode("utf-8")

    if kind is TransactionKind.TLS:
        return bytes(payload)

    return json.dumps({"urls": list(payload)}, indent=2, sort_keys=True).encode("utf-8")


def decode_payload(kind, data):
    """Deserialize a stored transaction payload.

    Parameters
    ----------
    kind : TransactionKind
        The kind of transaction
    data : bytes
        The stored form

    Returns
    -------
    HttpResponse, str, bytes, list
        The response

    Raises
    ------
    ArchiveCorrupt
        The data can't be parsed

    """
    if kind is TransactionKind.HTTP:
        return _decode_http(data)

    if kind is TransactionKind.WHOIS:
        return data.decode("utf-8", errors="replace")

    if kind is TransactionKind.TLS:
        return data

    try:
        urls = json.loads(data.decode("utf-8"))["urls"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ArchiveCorrupt("Search record is not valid JSON with a 'urls' list") from exc
    if not isinstance(urls, list) or not all(isinstance(url, str) for url in urls):
        raise ArchiveCorrupt("Search record 'urls' must be a list of strings")
    return urls


def _decode_http(data):
    """Parse a stored HTTP response (status line, headers, blank line, body)."""
    separators = [(data.find(sep), sep) for sep in (b"\r\n\r\n", b"\n\n") if data.find(sep) >= 0]
    if separators:
        position, separator = min(separators)
        head, body = data[:position], data[position + len(separator) :]
    else:
        head, body = data, b""

    lines = head.decode("latin-1").splitlines()
    try:
        status_code = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise ArchiveCorrupt("Invalid HTTP status line: {!r}".format(lines[0] if lines else "")) from exc

    headers = []
    for line in lines[1:]:
        name, sep, value = line.partition(":")
        if not sep:
            raise ArchiveCorrupt("Invalid HTTP header line: {!r}".format(line))
        headers.append((name.strip(), value.strip()))

    return HttpResponse(status_code, tuple(headers), body)


def encode_error(exc):
    """Serialize a failed transaction."""
    return "{}: {}\n".format(type(exc).__name__, exc).encode("utf-8")


def decode_error(data):
    """Rebuild the exception stored for a failed transaction.

    Raises
    ------
    ArchiveCorrupt
        The stored error does not name an exception of this package

    """
    name, _, message = data.decode("utf-8", errors="replace").strip().partition(":")
    exc_class = getattr(exceptions, name.strip(), None)
    if not isinstance(exc_class, type) or not issubclass(exc_class, DomainHolderError):
        raise ArchiveCorrupt("Unknown stored error '{}'".format(name))
    return exc_class(message.strip())


# ======================================================================= #
#                                                                         #
#                               The store                                 #
#                                                                         #
# ======================================================================= #
class FixtureStore(object):
    """The single gateway between the network and the rest of the package.

    Parameters
    ----------
    mode : FixtureMode
        ``live``, ``record`` or ``replay``
    archive_dir : str, None
        The archive directory (required for ``record`` and ``replay``)
    cache : EvidenceCache, None
        An evidence cache consulted in ``live`` mode

    """

    def __init__(self, mode=FixtureMode.LIVE, archive_dir=None, cache=None):
        self.mode = FixtureMode(mode)
        self.archive_dir = archive_dir
        self.cache = cache

        if self.mode is not FixtureMode.LIVE and not archive_dir:
            raise ConfigError("An archive directory is required in {} mode".format(self.mode.value))

        self._index = {}
        self._index_lock = threading.Lock()
        self._key_locks = {}

        #: Every transaction requested through this store, in order
        self.transactions = []
        self._log_lock = threading.Lock()

        if self.mode is FixtureMode.REPLAY:
            if not os.path.isdir(archive_dir):
                raise ArchiveCorrupt("Archive directory '{}' does not exist".format(archive_dir))
            self._load_index()
        elif self.mode is FixtureMode.RECORD:
            os.makedirs(archive_dir, exist_ok=True)
            if os.path.exists(self.index_path):
                self._load_index()

    @property
    def index_path(self):
        """The path to the archive index."""
        return os.path.join(self.archive_dir, constants.FIXTURE_INDEX_FILE)

    @property
    def entries(self):
        """The archive index entries, sorted by key."""
        with self._index_lock:
            return [self._index[key] for key in sorted(self._index)]

    def _load_index(self):
        """Read the archive index."""
        if not os.path.exists(self.index_path):
            raise ArchiveCorrupt("Archive '{}' has no {}".format(self.archive_dir, constants.FIXTURE_INDEX_FILE))

        index = {}
        with open(self.index_path, encoding="utf-8") as f:
            for line_number, line in enumerate(f, 1):
                line = line.rstrip("\r\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) not in (4, 5):
                    raise ArchiveCorrupt(
                        "{}:{}: expected 4 or 5 tab-separated fields, got {}".format(
                            self.index_path, line_number, len(fields)
                        )
                    )
                try:
                    kind = TransactionKind(fields[1])
                except ValueError as exc:
                    raise ArchiveCorrupt(
                        "{}:{}: unknown transaction kind '{}'".format(self.index_path, line_number, fields[1])
                    ) from exc
                digest = fields[4] if len(fields) == 5 and fields[4] else None
                index[fields[0]] = IndexEntry(fields[0], kind, fields[2], fields[3], digest)

        with self._index_lock:
            self._index = index
        _LOGGER.debug("Loaded %d archived transactions from %s", len(index), self.archive_dir)

    def _write_index(self):
        """Rewrite the archive index; the caller holds ``self._index_lock``."""
        tmp_path = self.index_path + ".tmp"
        with open(tmp_path, "w", encoding="utf-8") as f:
            for key in sorted(self._index):
                entry = self._index[key]
                f.write("\t".join((entry.key, entry.kind.value, entry.path, entry.timestamp, entry.digest or "")) + "\n")
        os.replace(tmp_path, self.index_path)

    def _key_lock(self, key):
        with self._index_lock:
            return self._key_locks.setdefault(key, threading.Lock())

    def _log(self, descriptor):
        with self._log_lock:
            self.transactions.append(descriptor)

    def count(self, kind=None, domain=None):
        """Count the logged transactions of one kind and/or concerning one registrable domain.

        Parameters
        ----------
        kind : TransactionKind, None
            Only count transactions of this kind
        domain : str, None
            Only count transactions concerning this registrable domain

        Returns
        -------
        int
            The number of matching transactions

        """
        with self._log_lock:
            return sum(
                1
                for descriptor in self.transactions
                if (kind is None or descriptor.kind is kind) and (domain is None or descriptor.domain == domain)
            )

    def replay_lookup(self, descriptor):
        """Read an archived transaction.

        Parameters
        ----------
        descriptor : Descriptor
            The transaction

        Returns
        -------
        HttpResponse, str, bytes, list
            The archived response

        Raises
        ------
        ReplayMiss
            The transaction is not in the archive
        ArchiveCorrupt
            The archived file is missing or malformed
        DomainHolderError
            The archived transaction failed; the stored error is raised again

        """
        with self._index_lock:
            entry = self._index.get(descriptor.key)

        if entry is None:
            raise ReplayMiss("Transaction not in archive: {}".format(descriptor.key))

        path = os.path.join(self.archive_dir, entry.path)
        try:
            with open(path, "rb") as f:
                data = f.read()
        except OSError as exc:
            raise ArchiveCorrupt("Archived file '{}' can't be read".format(path)) from exc

        if entry.path.endswith(constants.FIXTURE_ERROR_EXTENSION):
            raise decode_error(data)

        return decode_payload(entry.kind, data)

    def record_transaction(self, descriptor, payload=None, error=None):
        """Archive a transaction.

        Parameters
        ----------
        descriptor : Descriptor
            The transaction
        payload : HttpResponse, str, bytes, list, None
            The response, if the transaction succeeded
        error : DomainHolderError, None
            The error, if the transaction failed

        """
        if self.mode is FixtureMode.LIVE:
            raise ConfigError("Transactions can't be recorded in live mode")

        if error is not None:
            data = encode_error(error)
            extension = constants.FIXTURE_ERROR_EXTENSION
        else:
            data = encode_payload(descriptor.kind, payload)
            extension = constants.FIXTURE_EXTENSIONS[descriptor.kind]

        filename = hashlib.sha1(descriptor.key.encode("utf-8")).hexdigest()[:20] + extension
        timestamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")

        with self._key_lock(descriptor.key):
            with open(os.path.join(self.archive_dir, filename), "wb") as f:
                f.write(data)

            with self._index_lock:
                self._index[descriptor.key] = IndexEntry(
                    descriptor.key, descriptor.kind, filename, timestamp, hashlib.sha256(data).hexdigest()
                )
                self._write_index()

        _LOGGER.debug("Recorded %s as %s", descriptor.key, filename)

    def transact(self, descriptor, live_call):
        """Perform a transaction according to the store's mode.

        Parameters
        ----------
        descriptor : Descriptor
            The transaction
        live_call : callable
            Performs the transaction over the network and returns its payload

        Returns
        -------
        HttpResponse, str, bytes, list
            The response

        """
        self._log(descriptor)

        if self.mode is FixtureMode.REPLAY:
            _LOGGER.debug("Replaying %s", descriptor.key)
            return self.replay_lookup(descriptor)

        if self.mode is FixtureMode.LIVE and self.cache is not None:
            cached = self.cache.get(descriptor)
            if cached is not None:
                _LOGGER.debug("Evidence cache hit for %s", descriptor.key)
                return cached

        try:
            payload = live_call()
        except DomainHolderError as exc:
            if self.mode is FixtureMode.RECORD:
                self.record_transaction(descriptor, error=exc)
            raise

        if self.mode is FixtureMode.RECORD:
            self.record_transaction(descriptor, payload)
        elif self.cache is not None:
            self.cache.put(descriptor, payload)

        return payload

    def verify(self):
        """Check the archive's integrity.

        Returns
        -------
        list[str]
            One message per problem; empty if the archive is intact

        """
        problems = []
        for entry in self.entries:
            path = os.path.join(self.archive_dir, entry.path)
            try:
                with open(path, "rb") as f:
                    data = f.read()
            except OSError:
                problems.append("{}: file '{}' is missing".format(entry.key, entry.path))
                continue

            if entry.digest and hashlib.sha256(data).hexdigest() != entry.digest:
                problems.append("{}: digest mismatch for '{}'".format(entry.key, entry.path))

            try:
                if entry.path.endswith(constants.FIXTURE_ERROR_EXTENSION):
                    decode_error(data)
                else:
                    decode_payload(entry.kind, data)
            except ArchiveCorrupt as exc:
                problems.append("{}: {}".format(entry.key, exc))

            if not entry.key.startswith(entry.kind.value + " "):
                problems.append("{}: key does not match kind '{}'".format(entry.key, entry.kind.value))

        return problems
