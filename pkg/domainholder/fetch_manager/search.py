"""Pluggable web-search providers.

"""


import functools
import logging
import os

import requests

from .. import constants
from ..exceptions import ProviderUnavailable
from .fixture_store import search_descriptor

_LOGGER = logging.getLogger(__name__)


class SearchProvider(object):
    """A web-search provider.

    Subclasses implement :py:meth:`query_live`.  The credential is never stored; only the name of the environment
    variable that holds it is.

    Parameters
    ----------
    provider_id : str
        Identifies the provider in archive keys
    credential_env : str, None
        The environment variable holding the API credential
    result_limit : int
        The maximum number of results returned per query

    """

    def __init__(self, provider_id, credential_env=None, result_limit=constants.DEFAULT_SEARCH_RESULT_LIMIT):
        if result_limit < 1:
            raise ValueError("`result_limit` must be at least 1")

        self.provider_id = provider_id
        self.credential_env = credential_env
        self.result_limit = result_limit

    def credential(self):
        """Read the credential from the environment.

        Returns
        -------
        str
            The credential

        Raises
        ------
        ProviderUnavailable
            The environment variable is not set

        """
        value = os.environ.get(self.credential_env or "", "")
        if not value:
            raise ProviderUnavailable(
                "Search provider '{}' needs the {} environment variable".format(self.provider_id, self.credential_env)
            )
        return value

    def query_live(self, query):
        """Run ``query`` against the provider over the network.

        Returns
        -------
        list[str]
            The ranked result URLs

        """
        raise NotImplementedError


class GoogleCustomSearchProvider(SearchProvider):
    """The Google Custom Search JSON API.

    Parameters
    ----------
    credential_env : str
        The environment variable holding the API key
    engine_env : str
        The environment variable holding the search engine ID
    result_limit : int
        The maximum number of results (the API returns at most 10 per request)
    endpoint : str
        The API endpoint
    timeout_s : float
        The request timeout (in seconds)
    session : requests.Session, None
        The HTTP session

    """

    def __init__(
        self,
        credential_env=constants.DEFAULT_SEARCH_CREDENTIAL_ENV,
        engine_env=constants.DEFAULT_SEARCH_ENGINE_ENV,
        result_limit=constants.DEFAULT_SEARCH_RESULT_LIMIT,
        endpoint=constants.DEFAULT_SEARCH_ENDPOINT,
        timeout_s=constants.DEFAULT_TOTAL_TIMEOUT_S,
        session=None,
    ):
        super().__init__(constants.DEFAULT_SEARCH_PROVIDER, credential_env, result_limit)
        self.engine_env = engine_env
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        self._session = session

    def query_live(self, query):
        key = self.credential()
        engine = os.environ.get(self.engine_env, "")
        if not engine:
            raise ProviderUnavailable(
                "Search provider '{}' needs the {} environment variable".format(self.provider_id, self.engine_env)
            )

        session = self._session or requests.Session()
        params = {"key": key, "cx": engine, "q": query, "num": min(self.result_limit, 10)}
        try:
            response = session.get(self.endpoint, params=params, timeout=self.timeout_s)
            response.raise_for_status()
            items = response.json().get("items", [])
        except (requests.exceptions.RequestException, ValueError) as exc:
            raise ProviderUnavailable("Search provider '{}' failed: {}".format(self.provider_id, exc)) from exc

        return [item["link"] for item in items if item.get("link")]


def search(query, provider, store):
    """Run a web search through the fixture store.

    Searches hit the provider, not the target, so they never consume a domain's request budget.

    Parameters
    ----------
    query : str
        The search query
    provider : SearchProvider
        The search provider
    store : FixtureStore
        The transaction gateway

    Returns
    -------
    list[str]
        The ranked result URLs, truncated to ``provider.result_limit``

    Raises
    ------
    ValueError
        ``query`` is empty
    ProviderUnavailable
        The provider can't be used
    ReplayMiss
        The query is not in the archive (replay mode)

    """
    if not query or not query.strip():
        raise ValueError("Search query must not be empty")

    descriptor = search_descriptor(provider.provider_id, query)
    urls = store.transact(descriptor, functools.partial(provider.query_live, query))
    _LOGGER.debug("Search '%s' returned %d results", query, len(urls))
    return list(urls)[: provider.result_limit]
