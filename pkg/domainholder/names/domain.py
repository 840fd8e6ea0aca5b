"""Domain-name parsing and registrable-domain derivation.

* :py:func:`parse_fqdn` turns a host name into a canonical :py:class:`Fqdn`.
* :py:func:`registrable_domain` derives the SLD+public-suffix form using a pinned :py:class:`SuffixRules` snapshot.

"""


from dataclasses import dataclass
import functools
import ipaddress
import logging
import os
import pathlib
import re
from urllib.parse import urlsplit

import tldextract

from .. import constants
from ..exceptions import EmptyInput, IllegalLabel, InvalidDomain, IpLiteral, IsPublicSuffix, NoLabels

_LOGGER = logging.getLogger(__name__)

MAX_LABEL_BYTES = 63
MAX_NAME_BYTES = 253

REGEX_LABEL = re.compile(r"^[a-z0-9_](?:[a-z0-9_-]*[a-z0-9_])?$")
REGEX_SNAPSHOT = re.compile(r"^//\s*snapshot:\s*(?P<date>\S+)", re.IGNORECASE)


@dataclass(frozen=True)
class Fqdn(object):
    """A fully qualified domain name, stored as its lowercase labels."""

    labels: tuple

    @property
    def text(self):
        """The canonical dotted form."""
        return ".".join(self.labels)

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class RegistrableDomain(object):
    """The registrable (SLD + public suffix) form of a domain name."""

    text: str
    suffix: str

    @property
    def label(self):
        """The single label directly below the public suffix."""
        return self.text[: -len(self.suffix) - 1]

    def __str__(self):
        return self.text


def parse_fqdn(text):
    """Parse a host name into a canonical :py:class:`Fqdn`.

    Parameters
    ----------
    text : str
        The host name; case and a single trailing dot are ignored

    Returns
    -------
    Fqdn
        The parsed name

    Raises
    ------
    EmptyInput
        The name is empty after trimming
    IpLiteral
        The name is an IPv4 or IPv6 address
    IllegalLabel
        A label is empty, longer than 63 bytes, or contains forbidden characters, or the name is longer than 253 bytes

    """
    if text is None or not text.strip():
        raise EmptyInput("Domain name is empty")

    name = text.strip().lower()
    if name.endswith("."):
        name = name[:-1]

    try:
        ipaddress.ip_address(name.strip("[]"))
    except ValueError:
        pass
    else:
        raise IpLiteral("'{}' is an IP address".format(text))

    if len(name.encode("utf-8")) > MAX_NAME_BYTES:
        raise IllegalLabel("Domain name '{}' is longer than {} bytes".format(text, MAX_NAME_BYTES))

    labels = name.split(".")
    for label in labels:
        if not label:
            raise IllegalLabel("Domain name '{}' contains an empty label".format(text))
        if len(label.encode("utf-8")) > MAX_LABEL_BYTES:
            raise IllegalLabel("Label '{}' is longer than {} bytes".format(label, MAX_LABEL_BYTES))
        if not REGEX_LABEL.match(label):
            raise IllegalLabel("Label '{}' contains forbidden characters".format(label))

    return Fqdn(tuple(labels))


class SuffixRules(object):
    """A pinned public-suffix rules snapshot.

    The rules file has one rule per line; ``*.`` wildcard and ``!`` exception entries are honored and ``//`` comments are
    ignored.  Matching is delegated to ``tldextract`` pointed at the local file, so nothing is fetched from the network.

    Parameters
    ----------
    path : str
        The path to the rules file

    """

    def __init__(self, path=constants.PUBLIC_SUFFIX_FILE):
        self.path = os.path.abspath(path)
        self.snapshot_date = None
        rules = set()

        with open(self.path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("//"):
                    match = REGEX_SNAPSHOT.match(line)
                    if match and self.snapshot_date is None:
                        self.snapshot_date = match.group("date")
                    continue
                rules.add(line.split()[0].lower())

        self.rules = frozenset(rules)
        self._extractor = tldextract.TLDExtract(
            cache_dir=None,
            suffix_list_urls=(pathlib.Path(self.path).as_uri(),),
            fallback_to_snapshot=False,
            include_psl_private_domains=False,
        )

        # load the rules now so that concurrent lookups don't race to do it
        self._extractor("example.com")
        _LOGGER.debug("Loaded %d public suffix rules from %s (snapshot %s)", len(self.rules), self.path, self.snapshot_date)

    def public_suffix(self, fqdn):
        """Get the longest public suffix matching ``fqdn``.

        Parameters
        ----------
        fqdn : Fqdn
            The domain name

        Returns
        -------
        str, None
            The matching public suffix, or ``None`` if no rule matches

        """
        return self._extractor(fqdn.text).suffix or None


@functools.lru_cache(maxsize=None)
def default_suffix_rules():
    """Load the bundled public-suffix snapshot once.

    Returns
    -------
    SuffixRules
        The bundled rules

    """
    return SuffixRules(constants.PUBLIC_SUFFIX_FILE)


def registrable_domain(fqdn, rules=None):
    """Derive the registrable domain of ``fqdn``.

    Names under a TLD with no matching rule fall back to their last two labels.

    Parameters
    ----------
    fqdn : Fqdn
        The domain name
    rules : SuffixRules, None
        The public-suffix rules; defaults to the bundled snapshot

    Returns
    -------
    RegistrableDomain
        The public suffix plus one label

    Raises
    ------
    IsPublicSuffix
        ``fqdn`` is itself a public suffix
    NoLabels
        ``fqdn`` has too few labels

    """
    if not fqdn.labels:
        raise NoLabels("Domain name has no labels")

    rules = rules or default_suffix_rules()
    suffix = rules.public_suffix(fqdn)

    if suffix is None:
        if len(fqdn.labels) < 2:
            raise NoLabels("'{}' has no public suffix and fewer than two labels".format(fqdn.text))
        return RegistrableDomain(".".join(fqdn.labels[-2:]), fqdn.labels[-1])

    if suffix == fqdn.text:
        raise IsPublicSuffix("'{}' is a public suffix".format(fqdn.text))

    suffix_length = len(suffix.split("."))
    return RegistrableDomain(".".join(fqdn.labels[-suffix_length - 1 :]), suffix)


def registrable_domain_for_url(url, rules=None):
    """Derive the registrable domain of a URL's host.

    Parameters
    ----------
    url : str
        An absolute URL
    rules : SuffixRules, None
        The public-suffix rules; defaults to the bundled snapshot

    Returns
    -------
    RegistrableDomain
        The registrable domain of the URL's host

    Raises
    ------
    InvalidDomain
        The URL has no host or the host has no registrable form

    """
    host = urlsplit(url).hostname
    if not host:
        raise InvalidDomain("URL '{}' has no host".format(url))
    return registrable_domain(parse_fqdn(host), rules)
