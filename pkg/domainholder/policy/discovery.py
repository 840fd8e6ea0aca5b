"""Privacy policy discovery.

Starting from a registrable domain, resolve its homepage, scrape the homepage for policy links and, if that finds
nothing, search the web for the domain's policy.

"""


from dataclasses import dataclass, field
import functools
import logging
from urllib.parse import unquote, urldefrag, urljoin, urlsplit

from bs4 import BeautifulSoup

from .. import constants
from ..constants import CandidateSource, HomepageSource
from ..exceptions import (
    BudgetExhausted,
    FetchError,
    FormatError,
    InvalidDomain,
    NoCandidates,
    ProviderUnavailable,
    ReplayMiss,
    Unreachable,
)
from ..fetch_manager.search import search
from ..names.domain import registrable_domain_for_url

_LOGGER = logging.getLogger(__name__)

SKIPPED_HREF_PREFIXES = ("javascript:", "mailto:", "tel:", "#", "data:")


@dataclass(frozen=True)
class HomepageResolution(object):
    """Where a registrable domain's homepage was found.

    ``page`` is the fetched homepage; ``cross_sld_redirect`` is set when the redirect chain ends on a different
    registrable domain than the one resolved.

    """

    final_url: str
    redirect_chain: tuple
    cross_sld_redirect: bool
    source: HomepageSource
    page: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PolicyCandidate(object):
    """A URL that may hold a privacy policy."""

    url: str
    source: CandidateSource
    score: float
    anchor_text: str = None


@dataclass
class DiscoveryResult(object):
    """The evidence gathered by :py:meth:`PolicyDiscoverer.discover`.

    When the request budget runs out, the partial result travels on the
    :py:class:`~domainholder.exceptions.BudgetExhausted` exception.

    """

    homepage: HomepageResolution = None
    candidates: list = field(default_factory=list)
    searched: bool = False


class LinkLexicon(object):
    """Weighted keywords identifying privacy policy links.

    Parameters
    ----------
    keywords : Iterable[tuple]
        ``(keyword, weight)`` pairs

    """

    def __init__(self, keywords):
        self.keywords = tuple(sorted(((kw.casefold(), float(w)) for kw, w in keywords), key=lambda kw: -kw[1]))
        if not self.keywords:
            raise ValueError("A link lexicon needs at least one keyword")

    @classmethod
    def from_file(cls, path):
        """Load a ``keyword<TAB>weight`` file."""
        keywords = []
        with open(path, encoding="utf-8") as f:
            for line_number, line in enumerate(f, 1):
                line = line.rstrip("\r\n")
                if not line.strip() or line.startswith("#"):
                    continue
                keyword, sep, weight = line.rpartition("\t")
                try:
                    keywords.append((keyword.strip(), float(weight)))
                except ValueError as exc:
                    raise FormatError("expected 'keyword<TAB>weight'", path, line_number) from exc
                if not sep or not keyword.strip():
                    raise FormatError("expected 'keyword<TAB>weight'", path, line_number)
        return cls(keywords)

    def weight(self, text):
        """The weight of the strongest keyword found in ``text`` (0 if none)."""
        folded = " ".join((text or "").casefold().split())
        for keyword, weight in self.keywords:
            if keyword in folded:
                return weight
        return 0.0


@functools.lru_cache(maxsize=None)
def default_link_lexicon():
    """Load the bundled link lexicon once."""
    return LinkLexicon.from_file(constants.LINK_LEXICON_FILE)


def _path_words(url):
    """The URL path with separators turned into spaces, so ``/privacy-policy`` reads as ``privacy policy``."""
    path = unquote(urlsplit(url).path)
    for separator in "/-_.":
        path = path.replace(separator, " ")
    return path


def find_policy_links(html, base_url, lexicon=None):
    """Find and rank the privacy policy links on a page.

    Each link scores the weight of the strongest keyword in its anchor text, or half that weight if the keyword only
    appears in the link path.

    Parameters
    ----------
    html : bytes, str
        The page
    base_url : str
        The page URL, for resolving relative links
    lexicon : LinkLexicon, None
        The link keywords; defaults to the bundled lexicon

    Returns
    -------
    list[PolicyCandidate]
        The candidates, best first, ties in document order

    Raises
    ------
    NoCandidates
        No link matches a keyword

    """
    lexicon = lexicon or default_link_lexicon()
    soup = BeautifulSoup(html, "html.parser")

    scored = {}
    for position, anchor in enumerate(soup.find_all("a", href=True)):
        href = anchor["href"].strip()
        if not href or href.lower().startswith(SKIPPED_HREF_PREFIXES):
            continue

        url = urldefrag(urljoin(base_url, href))[0]
        if urlsplit(url).scheme not in ("http", "https"):
            continue

        text = " ".join(anchor.get_text(" ").split())
        score = max(lexicon.weight(text), constants.PATH_MATCH_FACTOR * lexicon.weight(_path_words(url)))
        if score <= 0:
            continue

        # keep the best score for a URL, at the position it first appeared
        if url in scored:
            best, first_position, best_text = scored[url]
            if score > best:
                scored[url] = (score, first_position, text or None)
        else:
            scored[url] = (score, position, text or None)

    if not scored:
        raise NoCandidates("No policy links on {}".format(base_url))

    ranked = sorted(scored.items(), key=lambda item: (-item[1][0], item[1][1]))
    return [PolicyCandidate(url, CandidateSource.HOMEPAGE_LINK, score, text) for url, (score, _, text) in ranked]


class PolicyDiscoverer(object):
    """Discover privacy policy candidates for registrable domains.

    Parameters
    ----------
    fetcher : HttpFetcherSync
        Fetches pages within the request budget
    provider : SearchProvider, None
        The web-search provider; without one, search fallbacks are skipped
    lexicon : LinkLexicon, None
        The link keywords; defaults to the bundled lexicon
    rules : SuffixRules, None
        The public-suffix rules; defaults to the bundled snapshot

    """

    def __init__(self, fetcher, provider=None, lexicon=None, rules=None):
        self.fetcher = fetcher
        self.provider = provider
        self.lexicon = lexicon or default_link_lexicon()
        self.rules = rules

    @property
    def store(self):
        """The fixture store shared with the fetcher."""
        return self.fetcher.store

    def _same_domain(self, url, rd):
        try:
            return registrable_domain_for_url(url, self.rules) == rd
        except InvalidDomain:
            return False

    def _search(self, query):
        if self.provider is None:
            raise ProviderUnavailable("No search provider is configured")
        return search(query, self.provider, self.store)

    def resolve_homepage(self, rd, budget):
        """Find the homepage of ``rd``.

        ``https://<rd>/`` is tried first and ``http://<rd>/`` only if that fails; a 4xx/5xx final status counts as a
        failure.  If both fail, the top search result on the same registrable domain is fetched instead.

        Parameters
        ----------
        rd : RegistrableDomain
            The registrable domain
        budget : BudgetTracker
            The budget for the current resolution

        Returns
        -------
        HomepageResolution
            The homepage, including the fetched page

        Raises
        ------
        Unreachable
            Both schemes and the search fallback failed
        BudgetExhausted
            The request budget ran out

        """
        for scheme in ("https", "http"):
            url = "{}://{}/".format(scheme, rd.text)
            try:
                page = self.fetcher.fetch(url, budget)
            except (BudgetExhausted, ReplayMiss):
                raise
            except FetchError as exc:
                _LOGGER.debug("Homepage %s failed: %s", url, exc)
                continue

            if not page.ok:
                _LOGGER.debug("Homepage %s returned status %d", url, page.status_code)
                continue

            return self._resolution(rd, page, HomepageSource.DIRECT_REQUEST)

        try:
            results = self._search(rd.text)
        except (ProviderUnavailable, ValueError) as exc:
            raise Unreachable("Homepage of {} is unreachable and search failed: {}".format(rd.text, exc)) from exc

        for url in results:
            if not self._same_domain(url, rd):
                continue
            try:
                page = self.fetcher.fetch(url, budget)
            except (BudgetExhausted, ReplayMiss):
                raise
            except FetchError as exc:
                raise Unreachable("Homepage of {} from search is unreachable: {}".format(rd.text, exc)) from exc
            if not page.ok:
                break
            return self._resolution(rd, page, HomepageSource.SEARCH_ENGINE)

        raise Unreachable("No homepage found for {}".format(rd.text))

    def _resolution(self, rd, page, source):
        cross_sld = not self._same_domain(page.final_url, rd)
        if cross_sld:
            _LOGGER.info("Homepage of %s redirected to another registrable domain: %s", rd.text, page.final_url)
        return HomepageResolution(page.final_url, page.redirect_chain, cross_sld, source, page)

    def search_policy(self, rd):
        """Search the web for the privacy policy of ``rd``.

        Parameters
        ----------
        rd : RegistrableDomain
            The registrable domain

        Returns
        -------
        list[PolicyCandidate]
            The same-domain results in rank order

        Raises
        ------
        ProviderUnavailable
            No provider is configured or the provider failed
        NoCandidates
            No result is on ``rd``

        """
        results = self._search("{} privacy policy".format(rd.text))

        candidates = []
        for url in results:
            url = urldefrag(url)[0]
            if self._same_domain(url, rd) and url not in (c.url for c in candidates):
                candidates.append(PolicyCandidate(url, CandidateSource.SEARCH_RESULT, 1.0 / (len(candidates) + 1)))

        if not candidates:
            raise NoCandidates("No search result for the policy of {} is on that domain".format(rd.text))
        return candidates

    def discover(self, rd, budget):
        """Resolve the homepage of ``rd`` and find policy candidates, searching only if the homepage has none.

        Candidates are not fetched here.

        Parameters
        ----------
        rd : RegistrableDomain
            The registrable domain
        budget : BudgetTracker
            A fresh budget for the current resolution

        Returns
        -------
        DiscoveryResult
            The homepage and the candidates

        Raises
        ------
        Unreachable
            No homepage was found
        NoCandidates
            Neither the homepage nor the search yielded a candidate; the ``partial`` attribute holds the homepage
        BudgetExhausted
            The request budget ran out; the ``partial`` attribute holds the evidence gathered so far

        """
        result = DiscoveryResult()
        try:
            result.homepage = self.resolve_homepage(rd, budget)
        except BudgetExhausted as exc:
            exc.partial = result
            raise

        try:
            result.candidates = find_policy_links(result.homepage.page.body, result.homepage.final_url, self.lexicon)
            return result
        except NoCandidates:
            _LOGGER.debug("No policy links on the homepage of %s; searching", rd.text)

        result.searched = True
        try:
            result.candidates = self.search_policy(rd)
        except NoCandidates as exc:
            exc.partial = result
            raise
        except ProviderUnavailable as exc:
            raise NoCandidates("No policy candidates for {}: {}".format(rd.text, exc), result) from exc
        return result
