"""Budgeted, rate-limited HTTP fetching.

* :py:class:`BudgetTracker` enforces the per-registrable-domain request budget.
* :py:class:`HostRateLimiter` spaces live requests to the same host.
* :py:class:`HttpFetcherSync` follows redirects manually so that every hop is budgeted and archived.

"""


from contextlib import contextmanager
from dataclasses import dataclass
import functools
import logging
import threading
import time
from urllib.parse import urldefrag, urljoin, urlsplit

import requests

from .. import constants
from ..constants import FixtureMode
from ..exceptions import (
    BudgetExhausted,
    ConfigError,
    FetchTimeout,
    InvalidDomain,
    LockNotAcquiredException,
    TooManyRedirects,
    TransportFailure,
)
from ..names.domain import registrable_domain_for_url
from .fixture_store import HttpResponse, http_descriptor

_LOGGER = logging.getLogger(__name__)

#: Use a timeout for the rate limiter lock
LOCK_KWARGS = {"timeout": constants.DEFAULT_LOCK_TIMEOUT_S}


@contextmanager
def _acquire(lock):
    """Handle acquisition and release of a ``threading.Lock`` object with ``LOCK_KWARGS`` keyword arguments.

    Parameters
    ----------
    lock : threading.Lock
        The lock that we will try to acquire

    Yields
    ------
    acquired : bool
        Whether or not the lock was acquired

    Raises
    ------
    LockNotAcquiredException
        Raised if the lock was not acquired

    """
    acquired = False
    try:
        acquired = lock.acquire(**LOCK_KWARGS)
        if not acquired:
            raise LockNotAcquiredException
        yield acquired

    finally:
        if acquired:
            lock.release()


@dataclass(frozen=True)
class FetchPolicy(object):
    """Settings shared by all HTTP fetches.

    The timeouts are in seconds.

    """

    max_requests_per_domain: int = constants.DEFAULT_MAX_REQUESTS_PER_DOMAIN
    connect_timeout_s: float = constants.DEFAULT_CONNECT_TIMEOUT_S
    total_timeout_s: float = constants.DEFAULT_TOTAL_TIMEOUT_S
    max_redirects: int = constants.DEFAULT_MAX_REDIRECTS
    accept_language: str = constants.DEFAULT_ACCEPT_LANGUAGE
    user_agent: str = constants.DEFAULT_USER_AGENT
    rate_limit_interval_s: float = constants.DEFAULT_RATE_LIMIT_INTERVAL_S

    def __post_init__(self):
        if self.max_requests_per_domain < 1:
            raise ConfigError("`max_requests_per_domain` must be at least 1")
        if self.max_redirects < 1:
            raise ConfigError("`max_redirects` must be at least 1")
        if self.connect_timeout_s <= 0 or self.total_timeout_s <= 0:
            raise ConfigError("Timeouts must be positive")
        if self.rate_limit_interval_s < 0:
            raise ConfigError("`rate_limit_interval_s` must not be negative")


@dataclass(frozen=True)
class FetchResult(object):
    """The outcome of fetching a URL and following its redirects.

    ``redirect_chain`` lists every requested URL in order, starting with the initial one and ending with
    ``final_url``.

    """

    final_url: str
    status_code: int
    body: bytes
    content_type: str
    redirect_chain: tuple

    @property
    def ok(self):
        """Whether the final response is a success."""
        return 200 <= self.status_code < 400

    @property
    def text(self):
        """The body decoded with the charset from the content type, if any."""
        charset = "utf-8"
        for param in (self.content_type or "").split(";")[1:]:
            name, _, value = param.strip().partition("=")
            if name.lower() == "charset" and value:
                charset = value.strip("\"'")
        try:
            return self.body.decode(charset, errors="replace")
        except LookupError:
            return self.body.decode("utf-8", errors="replace")

    def crosses_registrable_domain(self, rules=None):
        """Whether the redirect chain ends on a different registrable domain than it started."""
        try:
            return registrable_domain_for_url(self.redirect_chain[0], rules) != registrable_domain_for_url(
                self.final_url, rules
            )
        except InvalidDomain:
            return True


class BudgetTracker(object):
    """Count the requests issued to each registrable domain during one resolution.

    Parameters
    ----------
    max_requests : int
        The budget per registrable domain

    """

    def __init__(self, max_requests=constants.DEFAULT_MAX_REQUESTS_PER_DOMAIN):
        self.max_requests = max_requests
        self._counts = {}
        self._lock = threading.Lock()

    def consume(self, domain):
        """Take one request from ``domain``'s budget.

        Parameters
        ----------
        domain : RegistrableDomain, str
            The registrable domain being requested

        Raises
        ------
        BudgetExhausted
            The budget for ``domain`` is already used up

        """
        key = str(domain)
        with self._lock:
            used = self._counts.get(key, 0)
            if used >= self.max_requests:
                raise BudgetExhausted("Request budget of {} for '{}' is exhausted".format(self.max_requests, key))
            self._counts[key] = used + 1

    def used(self, domain):
        """The number of requests issued to ``domain`` so far."""
        with self._lock:
            return self._counts.get(str(domain), 0)

    def remaining(self, domain):
        """The number of requests still allowed for ``domain``."""
        return self.max_requests - self.used(domain)


class HostRateLimiter(object):
    """Space live transactions to the same host at least ``interval_s`` seconds apart.

    Parameters
    ----------
    interval_s : float
        The minimum interval between two transactions to one host
    clock : callable
        A monotonic clock
    sleep : callable
        Sleeps for the given number of seconds

    """

    def __init__(self, interval_s=constants.DEFAULT_RATE_LIMIT_INTERVAL_S, clock=time.monotonic, sleep=time.sleep):
        self.interval_s = interval_s
        self._clock = clock
        self._sleep = sleep
        self._next_slot = {}
        self._lock = threading.Lock()

    def wait(self, host):
        """Block until a transaction to ``host`` is allowed.

        Parameters
        ----------
        host : str
            The host about to be contacted

        Returns
        -------
        float
            How long we waited (in seconds)

        """
        with _acquire(self._lock):
            now = self._clock()
            slot = max(now, self._next_slot.get(host, now))
            self._next_slot[host] = slot + self.interval_s

        delay = slot - now
        if delay > 0:
            _LOGGER.debug("Rate limiting %s for %.2f seconds", host, delay)
            self._sleep(delay)
        return delay


class HttpFetcherSync(object):
    """Fetch URLs through a :py:class:`~domainholder.fetch_manager.fixture_store.FixtureStore`.

    Parameters
    ----------
    store : FixtureStore
        The transaction gateway
    policy : FetchPolicy, None
        Fetch settings; defaults to :py:class:`FetchPolicy` ``()``
    rules : SuffixRules, None
        The public-suffix rules; defaults to the bundled snapshot
    rate_limiter : HostRateLimiter, None
        Spaces live requests; one is created from ``policy`` if not provided
    session : requests.Session, None
        The HTTP session used for live requests

    """

    def __init__(self, store, policy=None, rules=None, rate_limiter=None, session=None):
        self.store = store
        self.policy = policy or FetchPolicy()
        self.rules = rules
        self.rate_limiter = rate_limiter or HostRateLimiter(self.policy.rate_limit_interval_s)
        self._session = session

    @property
    def session(self):
        """The ``requests`` session, created on first use."""
        if self._session is None:
            self._session = requests.Session()
        return self._session

    def new_budget(self):
        """Create a budget tracker for one resolution."""
        return BudgetTracker(self.policy.max_requests_per_domain)

    def fetch(self, url, budget):
        """Fetch ``url``, following redirects manually.

        Parameters
        ----------
        url : str
            The absolute URL to fetch
        budget : BudgetTracker
            The budget for the current resolution; every hop consumes one request from its own registrable domain

        Returns
        -------
        FetchResult
            The final response and the redirect chain

        Raises
        ------
        BudgetExhausted
            A hop would exceed its domain's budget
        TooManyRedirects
            The chain is longer than ``policy.max_redirects``
        FetchTimeout, TransportFailure
            A hop failed

        """
        chain = []
        current = url

        while True:
            if len(chain) >= self.policy.max_redirects:
                raise TooManyRedirects("More than {} URLs in the redirect chain for {}".format(len(chain), url))

            try:
                domain = registrable_domain_for_url(current, self.rules)
            except InvalidDomain as exc:
                raise TransportFailure("Can't fetch '{}': {}".format(current, exc)) from exc

            budget.consume(domain)
            chain.append(current)

            descriptor = http_descriptor(current, domain=domain.text)
            response = self.store.transact(descriptor, functools.partial(self._get_live, current))

            location = response.header("Location")
            if response.status_code in constants.REDIRECT_STATUS_CODES and location:
                current = urldefrag(urljoin(current, location))[0]
                _LOGGER.debug("%s redirected to %s", chain[-1], current)
                continue

            return FetchResult(
                final_url=current,
                status_code=response.status_code,
                body=response.body,
                content_type=response.header("Content-Type", ""),
                redirect_chain=tuple(chain),
            )

    def _get_live(self, url):
        """Issue a single GET request over the network.

        Parameters
        ----------
        url : str
            The URL to request

        Returns
        -------
        HttpResponse
            The response, without following redirects

        """
        if self.store.mode is not FixtureMode.REPLAY:
            self.rate_limiter.wait(urlsplit(url).hostname or "")

        headers = {"User-Agent": self.policy.user_agent, "Accept-Language": self.policy.accept_language}
        try:
            response = self.session.get(
                url,
                headers=headers,
                timeout=(self.policy.connect_timeout_s, self.policy.total_timeout_s),
                allow_redirects=False,
            )
        except requests.exceptions.Timeout as exc:
            raise FetchTimeout("Request to '{}' timed out".format(url)) from exc
        except requests.exceptions.RequestException as exc:
            raise TransportFailure("Request to '{}' failed: {}".format(url, exc)) from exc

        _LOGGER.debug("GET %s -> %d", url, response.status_code)
        return HttpResponse(response.status_code, tuple(response.headers.items()), response.content)
