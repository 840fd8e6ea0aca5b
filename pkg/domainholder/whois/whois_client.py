"""A WHOIS client speaking the native protocol (TCP port 43, query terminated by CRLF).

"""


from dataclasses import dataclass
import functools
import logging
import socket

from .. import constants
from ..constants import FixtureMode
from ..exceptions import EmptyResponse, FetchTimeout, FormatError, NoServerForTld, ReplayMiss, TransportFailure
from ..fetch_manager.fetch_manager_sync import HostRateLimiter
from ..fetch_manager.fixture_store import whois_descriptor

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class WhoisRecord(object):
    """The responses collected for one WHOIS lookup.

    ``hops`` is a tuple of ``(server, raw text)`` pairs in query order.

    """

    domain: str
    hops: tuple

    @property
    def raw(self):
        """All hop responses, concatenated."""
        return "\n".join(text for _, text in self.hops)

    @property
    def final_server(self):
        """The server queried last."""
        return self.hops[-1][0]

    @property
    def locator(self):
        """A reference to the record, used as evidence."""
        return "whois://{}/{}".format(self.final_server, self.domain)


class TldServerMap(object):
    """Map TLDs to WHOIS servers.

    Parameters
    ----------
    path : str
        A ``tld<TAB>server`` file; a server of ``NONE`` marks a TLD with no WHOIS service

    """

    def __init__(self, path=constants.TLD_SERVERS_FILE):
        self.path = path
        self.servers = {}

        with open(path, encoding="utf-8") as f:
            for line_number, line in enumerate(f, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                fields = line.split()
                if len(fields) != 2:
                    raise FormatError("expected 'tld<TAB>server'", path, line_number)
                self.servers[fields[0].lower().lstrip(".")] = fields[1]

    def server_for(self, domain):
        """Get the registry WHOIS server for ``domain``.

        TLDs not in the map fall back to ``whois.nic.<tld>``.

        Parameters
        ----------
        domain : str
            The registrable domain

        Returns
        -------
        str
            The server host name

        Raises
        ------
        NoServerForTld
            The TLD has no WHOIS service

        """
        tld = domain.rsplit(".", 1)[-1].lower()
        server = self.servers.get(tld, "whois.nic.{}".format(tld))
        if server.upper() == constants.WHOIS_NO_SERVER:
            raise NoServerForTld("There is no WHOIS server for '.{}'".format(tld))
        return server


@functools.lru_cache(maxsize=None)
def default_tld_servers():
    """Load the bundled TLD server map once."""
    return TldServerMap(constants.TLD_SERVERS_FILE)


def find_referral(text, current_server):
    """Find the registrar WHOIS server named in a response.

    Parameters
    ----------
    text : str
        A WHOIS response
    current_server : str
        The server that produced ``text``

    Returns
    -------
    str, None
        The referred server, or ``None`` if there is no usable referral

    """
    for match in constants.REGEX_WHOIS_REFERRAL.finditer(text):
        server = match.group("server").strip().lower()
        if "://" in server:
            server = server.split("://", 1)[1]
        server = server.split("/", 1)[0]
        if server and server != current_server.lower():
            return server
    return None


class WhoisClient(object):
    """Query WHOIS servers through a :py:class:`~domainholder.fetch_manager.fixture_store.FixtureStore`.

    Parameters
    ----------
    store : FixtureStore
        The transaction gateway
    servers : TldServerMap, None
        The TLD server map; defaults to the bundled one
    timeout_s : float
        The socket timeout (in seconds)
    max_hops : int
        The maximum number of servers queried per lookup
    rate_limiter : HostRateLimiter, None
        Spaces live queries to the same server

    """

    def __init__(
        self,
        store,
        servers=None,
        timeout_s=constants.DEFAULT_WHOIS_TIMEOUT_S,
        max_hops=constants.WHOIS_MAX_HOPS,
        rate_limiter=None,
    ):
        self.store = store
        self.servers = servers or default_tld_servers()
        self.timeout_s = timeout_s
        self.max_hops = max_hops
        self.rate_limiter = rate_limiter or HostRateLimiter()

    def query(self, domain):
        """Look up ``domain``, following registry to registrar referrals.

        Parameters
        ----------
        domain : RegistrableDomain, str
            The registrable domain

        Returns
        -------
        WhoisRecord
            Every hop's response

        Raises
        ------
        NoServerForTld
            The TLD has no WHOIS service
        EmptyResponse
            The registry returned nothing
        FetchTimeout, TransportFailure
            The registry query failed
        ReplayMiss
            The registry hop is not in the archive (replay mode)

        """
        domain = str(domain).lower()
        server = self.servers.server_for(domain)
        hops = []

        while len(hops) < self.max_hops:
            descriptor = whois_descriptor(server, domain, domain=domain)
            try:
                text = self.store.transact(descriptor, functools.partial(self._query_live, server, domain))
            except (FetchTimeout, TransportFailure, ReplayMiss):
                if not hops:
                    raise
                _LOGGER.info("Referral to %s for %s failed; keeping %d hop(s)", server, domain, len(hops))
                break

            if not text.strip():
                if not hops:
                    raise EmptyResponse("{} returned nothing for '{}'".format(server, domain))
                break

            hops.append((server, text))
            referral = find_referral(text, server)
            if referral is None:
                break
            server = referral

        _LOGGER.debug("WHOIS lookup for %s took %d hop(s)", domain, len(hops))
        return WhoisRecord(domain, tuple(hops))

    def _query_live(self, server, domain):
        """Send one query over the network and read the response to EOF."""
        if self.store.mode is not FixtureMode.REPLAY:
            self.rate_limiter.wait(server)

        chunks = []
        try:
            with socket.create_connection((server, constants.WHOIS_PORT), timeout=self.timeout_s) as sock:
                sock.sendall("{}\r\n".format(domain).encode("utf-8"))
                while True:
                    chunk = sock.recv(4096)
                    if not chunk:
                        break
                    chunks.append(chunk)
        except socket.timeout as exc:
            raise FetchTimeout("WHOIS query to {} timed out".format(server)) from exc
        except OSError as exc:
            raise TransportFailure("WHOIS query to {} failed: {}".format(server, exc)) from exc

        return b"".join(chunks).decode("utf-8", errors="replace")


def whois_query(domain, store):
    """Look up ``domain`` with a default :py:class:`WhoisClient`.

    Parameters
    ----------
    domain : RegistrableDomain, str
        The registrable domain
    store : FixtureStore
        The transaction gateway

    Returns
    -------
    WhoisRecord
        Every hop's response

    """
    return WhoisClient(store).query(domain)
