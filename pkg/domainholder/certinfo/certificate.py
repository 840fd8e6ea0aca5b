"""TLS leaf certificate retrieval and subject inspection.

Only the leaf certificate is read; the chain is neither built nor validated, so expired and self-signed certificates
are still summarized.

"""


from dataclasses import dataclass
from datetime import datetime
import functools
import logging
import socket
import ssl

from cryptography import x509
from cryptography.x509.oid import ExtensionOID, NameOID

from .. import constants
from ..constants import FixtureMode, ValidationClass
from ..exceptions import ArchiveCorrupt, HandshakeFailure, NoTls
from ..fetch_manager.fetch_manager_sync import HostRateLimiter
from ..fetch_manager.fixture_store import tls_descriptor
from ..names.org import load_word_list

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CertificateSummary(object):
    """The identity fields of a leaf certificate."""

    subject_common_name: str
    subject_organization: str
    issuer_name: str
    subject_alt_names: tuple
    policy_oids: tuple
    not_before: datetime
    not_after: datetime


def _first_attribute(name, oid):
    attributes = name.get_attributes_for_oid(oid)
    return attributes[0].value if attributes else None


def _validity(cert, name):
    """Read a validity bound as an aware UTC datetime when the installed `cryptography` supports it."""
    if hasattr(cert, name + "_utc"):
        return getattr(cert, name + "_utc")
    return getattr(cert, name)


def summarize_certificate(der):
    """Decode a DER leaf certificate.

    Parameters
    ----------
    der : bytes
        The DER-encoded certificate

    Returns
    -------
    CertificateSummary
        The decoded identity fields

    Raises
    ------
    HandshakeFailure
        The bytes are not a certificate

    """
    try:
        cert = x509.load_der_x509_certificate(bytes(der))
    except ValueError as exc:
        raise HandshakeFailure("The server sent an undecodable certificate") from exc

    try:
        san = cert.extensions.get_extension_for_oid(ExtensionOID.SUBJECT_ALTERNATIVE_NAME).value
        alt_names = tuple(san.get_values_for_type(x509.DNSName)) + tuple(
            str(ip) for ip in san.get_values_for_type(x509.IPAddress)
        )
    except x509.ExtensionNotFound:
        alt_names = ()

    try:
        policies = cert.extensions.get_extension_for_oid(ExtensionOID.CERTIFICATE_POLICIES).value
        policy_oids = tuple(policy.policy_identifier.dotted_string for policy in policies)
    except x509.ExtensionNotFound:
        policy_oids = ()

    return CertificateSummary(
        subject_common_name=_first_attribute(cert.subject, NameOID.COMMON_NAME),
        subject_organization=_first_attribute(cert.subject, NameOID.ORGANIZATION_NAME),
        issuer_name=cert.issuer.rfc4514_string(),
        subject_alt_names=alt_names,
        policy_oids=policy_oids,
        not_before=_validity(cert, "not_valid_before"),
        not_after=_validity(cert, "not_valid_after"),
    )


class CertificateInspector(object):
    """Retrieve leaf certificates through a :py:class:`~domainholder.fetch_manager.fixture_store.FixtureStore`.

    Parameters
    ----------
    store : FixtureStore
        The transaction gateway
    timeout_s : float
        The connection timeout (in seconds)
    port : int
        The TLS port
    rate_limiter : HostRateLimiter, None
        Spaces live handshakes to the same host

    """

    def __init__(self, store, timeout_s=constants.DEFAULT_TLS_TIMEOUT_S, port=constants.TLS_PORT, rate_limiter=None):
        self.store = store
        self.timeout_s = timeout_s
        self.port = port
        self.rate_limiter = rate_limiter or HostRateLimiter()

    def fetch_leaf_certificate(self, fqdn):
        """Perform one TLS handshake with ``fqdn`` and summarize its leaf certificate.

        Parameters
        ----------
        fqdn : Fqdn, str
            The host; also sent as the server name indication

        Returns
        -------
        CertificateSummary
            The decoded certificate

        Raises
        ------
        NoTls
            The host does not accept TLS connections
        HandshakeFailure
            The handshake failed
        ReplayMiss
            The handshake is not in the archive (replay mode)

        """
        host = str(fqdn)
        der = self.store.transact(tls_descriptor(host, self.port), functools.partial(self._handshake_live, host))
        try:
            return summarize_certificate(der)
        except HandshakeFailure:
            if self.store.mode is FixtureMode.REPLAY:
                raise ArchiveCorrupt("Archived certificate for {} can't be decoded".format(host))
            raise

    def _handshake_live(self, host):
        if self.store.mode is not FixtureMode.REPLAY:
            self.rate_limiter.wait(host)

        context = ssl.create_default_context()
        context.check_hostname = False
        context.verify_mode = ssl.CERT_NONE

        try:
            sock = socket.create_connection((host, self.port), timeout=self.timeout_s)
        except (ConnectionRefusedError, socket.gaierror) as exc:
            raise NoTls("{} does not accept connections on port {}".format(host, self.port)) from exc
        except OSError as exc:
            raise NoTls("Can't connect to {}:{}: {}".format(host, self.port, exc)) from exc

        try:
            with context.wrap_socket(sock, server_hostname=host) as tls_sock:
                der = tls_sock.getpeercert(binary_form=True)
        except (ssl.SSLError, socket.timeout, ConnectionResetError) as exc:
            raise HandshakeFailure("TLS handshake with {} failed: {}".format(host, exc)) from exc
        finally:
            sock.close()

        if not der:
            raise HandshakeFailure("{} presented no certificate".format(host))
        _LOGGER.debug("Captured a %d-byte leaf certificate from %s", len(der), host)
        return der


def org_from_certificate(summary):
    """Get the subject organization of a certificate, or ``None`` if it is missing or empty."""
    return summary.subject_organization or None


@functools.lru_cache(maxsize=None)
def default_ev_oids():
    """Load the bundled EV policy OIDs once."""
    return frozenset(load_word_list(constants.EV_OIDS_FILE))


def classify_validation(summary, ev_oids=None):
    """Classify a certificate as EV, OV, or DV.

    Parameters
    ----------
    summary : CertificateSummary
        The certificate
    ev_oids : Iterable[str], None
        The EV policy OIDs; defaults to the bundled list

    Returns
    -------
    ValidationClass
        ``EV`` if a policy OID is an EV OID, ``OV`` if the subject has an organization, ``DV`` otherwise

    """
    ev_oids = default_ev_oids() if ev_oids is None else frozenset(ev_oids)
    if any(oid in ev_oids for oid in summary.policy_oids):
        return ValidationClass.EV
    if org_from_certificate(summary) is not None:
        return ValidationClass.OV
    return ValidationClass.DV
