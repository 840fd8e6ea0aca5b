"""Attribute domains to the organizations holding them.

The privacy policy pipeline is tried first.  If it fails, or the homepage redirected to another registrable domain,
the WHOIS registrant is used instead; if that is missing or redacted too, the domain is left unidentified.

"""


from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
import logging

from .. import constants
from ..certinfo.certificate import CertificateInspector, classify_validation, org_from_certificate
from ..constants import Method, RegistrantKind
from ..exceptions import (
    BudgetExhausted,
    DomainHolderError,
    FetchError,
    InvalidDomain,
    NoCandidates,
    PolicyStageError,
    ProviderUnavailable,
    Unreachable,
)
from ..fetch_manager.fetch_manager_sync import HttpFetcherSync
from ..names.domain import parse_fqdn, registrable_domain
from ..policy.analysis import PolicyAnalyzer
from ..policy.discovery import PolicyDiscoverer
from ..whois.registrant import parse_registrant
from ..whois.whois_client import WhoisClient

_LOGGER = logging.getLogger(__name__)

#: Stages reached only after a page passed the classifier
POST_CLASSIFIER_STAGES = (constants.STAGE_SELECT_PARAGRAPHS, constants.STAGE_EXTRACT_CONTROLLER)

#: Flags recorded for each unusable registrant classification
REGISTRANT_FLAGS = {
    RegistrantKind.REDACTED: constants.FLAG_WHOIS_REDACTED,
    RegistrantKind.ABSENT: constants.FLAG_WHOIS_ABSENT,
    RegistrantKind.EMPTY: constants.FLAG_WHOIS_EMPTY,
}


@dataclass(frozen=True)
class AttributionResult(object):
    """The organization attributed to a domain, and how.

    ``evidence`` is ``<policy url>#paragraph=<index>`` for policy attributions and ``whois://<server>/<domain>`` for
    WHOIS attributions.  ``certificate_note`` is informational and never decides the organization.

    """

    input_fqdn: str
    registrable_domain: str
    organization: str
    method: Method
    evidence: str = None
    flags: tuple = ()
    certificate_note: object = None

    @property
    def identified(self):
        """Whether an organization was attributed."""
        return self.method is not Method.UNIDENTIFIED


@dataclass(frozen=True)
class TechniqueOutcome(object):
    """What one attribution technique says about a domain.

    ``detail`` is the evidence locator when the technique attributed an organization, and the failure otherwise.

    """

    technique: str
    organization: str = None
    detail: str = None


def policy_flag(stage):
    """The flag recorded when a policy pipeline stage fails."""
    return "{}:{}".format(constants.FLAG_POLICY_STAGE_FAILED, stage)


def whois_failed_flag(exc):
    """The flag recorded when a WHOIS lookup fails."""
    return "{}:{}".format(constants.FLAG_WHOIS_FAILED, type(exc).__name__)


class AttributionResolverSync(object):
    """Resolve domains to organizations.

    Parameters
    ----------
    store : FixtureStore
        The transaction gateway
    fetch_policy : FetchPolicy, None
        HTTP fetch settings
    provider : SearchProvider, None
        The web-search provider; without one, search fallbacks fail
    analyzer : PolicyAnalyzer, None
        The policy analysis pipeline
    whois_client : WhoisClient, None
        The WHOIS client
    certificate_inspector : CertificateInspector, None
        The certificate inspector
    rules : SuffixRules, None
        The public-suffix rules; defaults to the bundled snapshot
    redaction_lexicon : RedactionLexicon, None
        The WHOIS redaction lexicon; defaults to the bundled one
    link_lexicon : LinkLexicon, None
        The policy link keywords; defaults to the bundled lexicon
    compare_certificates : bool
        Whether to attach the certificate of each domain as a note
    rate_limiter : HostRateLimiter, None
        Spaces live transactions to the same host; shared by the fetcher, the WHOIS client and the certificate inspector

    """

    def __init__(
        self,
        store,
        fetch_policy=None,
        provider=None,
        analyzer=None,
        whois_client=None,
        certificate_inspector=None,
        rules=None,
        redaction_lexicon=None,
        link_lexicon=None,
        compare_certificates=False,
        rate_limiter=None,
    ):
        self.store = store
        self.rules = rules
        self.fetcher = HttpFetcherSync(store, fetch_policy, rules, rate_limiter)
        self.discoverer = PolicyDiscoverer(self.fetcher, provider, link_lexicon, rules)
        self.analyzer = analyzer or PolicyAnalyzer()
        self.whois_client = whois_client or WhoisClient(store, rate_limiter=self.fetcher.rate_limiter)
        self.certificate_inspector = certificate_inspector or CertificateInspector(
            store, rate_limiter=self.fetcher.rate_limiter
        )
        self.redaction_lexicon = redaction_lexicon
        self.compare_certificates = compare_certificates

    # ======================================================================= #
    #                                                                         #
    #                               Policy path                               #
    #                                                                         #
    # ======================================================================= #
    def _analyze_candidates(self, candidates, budget, flags):
        """Analyze up to two candidates in order.

        Returns
        -------
        tuple
            The :py:class:`~domainholder.policy.analysis.PolicyAnalysis` or ``None``, and whether a page passed the
            classifier (which ends the policy path)

        """
        for candidate in candidates[: constants.MAX_CANDIDATES_PER_SOURCE]:
            try:
                page = self.fetcher.fetch(candidate.url, budget)
            except BudgetExhausted:
                flags.add(policy_flag(constants.STAGE_BUDGET))
                return None, True
            except FetchError as exc:
                _LOGGER.debug("Candidate %s failed: %s", candidate.url, exc)
                flags.add(policy_flag(constants.STAGE_FETCH_CANDIDATE))
                continue

            if not page.ok:
                flags.add(policy_flag(constants.STAGE_FETCH_CANDIDATE))
                continue

            try:
                return self.analyzer.analyze(page.body, page.final_url), True
            except PolicyStageError as exc:
                _LOGGER.debug("Candidate %s failed at %s: %s", page.final_url, exc.stage, exc)
                flags.add(policy_flag(exc.stage))
                if exc.stage in POST_CLASSIFIER_STAGES:
                    return None, True

        return None, False

    def run_policy_path(self, rd, budget, flags):
        """Discover and analyze the privacy policy of ``rd``.

        Homepage link candidates are tried first; if none of them yields a policy, search result candidates are tried.
        The first page that passes the classifier ends the search.

        Parameters
        ----------
        rd : RegistrableDomain
            The registrable domain
        budget : BudgetTracker
            The budget for this resolution
        flags : set
            Stage failures are added here

        Returns
        -------
        tuple
            The :py:class:`~domainholder.policy.analysis.PolicyAnalysis` or ``None``, and the homepage resolution or
            ``None``

        """
        try:
            discovery = self.discoverer.discover(rd, budget)
        except BudgetExhausted as exc:
            flags.add(policy_flag(constants.STAGE_BUDGET))
            discovery = exc.partial
        except NoCandidates as exc:
            searched = exc.partial is not None and exc.partial.searched
            flags.add(policy_flag(constants.STAGE_SEARCH_POLICY if searched else constants.STAGE_FIND_LINKS))
            discovery = exc.partial
        except (Unreachable, FetchError) as exc:
            _LOGGER.debug("Homepage of %s not resolved: %s", rd.text, exc)
            flags.add(policy_flag(constants.STAGE_RESOLVE_HOMEPAGE))
            return None, None

        homepage = discovery.homepage if discovery is not None else None
        if homepage is None or not discovery.candidates:
            return None, homepage

        analysis, done = self._analyze_candidates(discovery.candidates, budget, flags)
        if done or discovery.searched:
            return analysis, homepage

        try:
            candidates = self.discoverer.search_policy(rd)
        except (NoCandidates, ProviderUnavailable, FetchError) as exc:
            _LOGGER.debug("Policy search for %s failed: %s", rd.text, exc)
            flags.add(policy_flag(constants.STAGE_SEARCH_POLICY))
            return None, homepage

        analysis, _ = self._analyze_candidates(candidates, budget, flags)
        return analysis, homepage

    # ======================================================================= #
    #                                                                         #
    #                                Resolution                               #
    #                                                                         #
    # ======================================================================= #
    def certificate_note(self, fqdn):
        """Summarize the certificate of ``fqdn``, or ``None`` if it can't be retrieved."""
        try:
            return self.certificate_inspector.fetch_leaf_certificate(fqdn)
        except DomainHolderError as exc:
            _LOGGER.debug("No certificate for %s: %s", fqdn, exc)
            return None

    def resolve(self, fqdn):
        """Attribute ``fqdn`` to the organization holding it.

        Parameters
        ----------
        fqdn : Fqdn, str
            The domain name

        Returns
        -------
        AttributionResult
            The attribution; network and content failures end up as flags on an unidentified result

        Raises
        ------
        InvalidDomain
            ``fqdn`` is not a valid domain name or has no registrable form

        """
        if isinstance(fqdn, str):
            fqdn = parse_fqdn(fqdn)
        rd = registrable_domain(fqdn, self.rules)

        flags = set()
        budget = self.fetcher.new_budget()
        note = self.certificate_note(fqdn) if self.compare_certificates else None

        try:
            analysis, homepage = self.run_policy_path(rd, budget, flags)
        except DomainHolderError as exc:
            _LOGGER.warning("Policy path for %s failed unexpectedly: %s", rd.text, exc)
            flags.add(policy_flag(type(exc).__name__))
            analysis, homepage = None, None

        if homepage is not None and homepage.cross_sld_redirect:
            flags.add(constants.FLAG_CROSS_SLD_REDIRECT)
            if analysis is not None:
                _LOGGER.info(
                    "Discarding '%s' for %s: the homepage redirected to %s", analysis.controller, rd.text, homepage.final_url
                )
        elif analysis is not None:
            return AttributionResult(
                fqdn.text,
                rd.text,
                analysis.controller,
                Method.POLICY,
                "{}#paragraph={}".format(analysis.url, analysis.paragraph_index),
                tuple(sorted(flags)),
                note,
            )

        try:
            record = self.whois_client.query(rd)
        except DomainHolderError as exc:
            _LOGGER.debug("WHOIS lookup for %s failed: %s", rd.text, exc)
            flags.add(whois_failed_flag(exc))
            return AttributionResult(fqdn.text, rd.text, None, Method.UNIDENTIFIED, None, tuple(sorted(flags)), note)

        registrant = parse_registrant(record, self.redaction_lexicon)
        if registrant.kind is RegistrantKind.ORG:
            return AttributionResult(
                fqdn.text, rd.text, registrant.value, Method.WHOIS, record.locator, tuple(sorted(flags)), note
            )

        flags.add(REGISTRANT_FLAGS[registrant.kind])
        return AttributionResult(fqdn.text, rd.text, None, Method.UNIDENTIFIED, None, tuple(sorted(flags)), note)

    def resolve_batch(self, fqdns, parallelism=1):
        """Resolve many domains, at most ``parallelism`` at a time.

        Names sharing a registrable domain are resolved once; each name still gets its own certificate note.  Invalid
        names yield unidentified results flagged ``InvalidDomain``.

        Parameters
        ----------
        fqdns : Iterable[str]
            The domain names
        parallelism : int
            The maximum number of concurrent resolutions

        Returns
        -------
        list[AttributionResult]
            One result per input, in input order

        """
        if parallelism < 1:
            raise ValueError("`parallelism` must be at least 1")

        items = []
        for text in fqdns:
            try:
                fqdn = parse_fqdn(text)
                items.append((text, fqdn, registrable_domain(fqdn, self.rules).text))
            except InvalidDomain as exc:
                _LOGGER.warning("Skipping '%s': %s", text, exc)
                items.append((text, None, None))

        with ThreadPoolExecutor(max_workers=parallelism) as executor:
            futures = {}
            resolved = {}
            notes = {}
            for _, fqdn, rd in items:
                if rd is None:
                    continue
                if rd not in futures:
                    futures[rd] = executor.submit(self.resolve, fqdn)
                    resolved[rd] = fqdn.text
                elif self.compare_certificates and fqdn.text != resolved[rd] and fqdn.text not in notes:
                    notes[fqdn.text] = executor.submit(self.certificate_note, fqdn)

            results = []
            for text, fqdn, rd in items:
                if rd is None:
                    results.append(
                        AttributionResult(
                            text.strip(), None, None, Method.UNIDENTIFIED, None, (constants.FLAG_INVALID_DOMAIN,)
                        )
                    )
                else:
                    result = replace(futures[rd].result(), input_fqdn=fqdn.text)
                    if fqdn.text in notes:
                        result = replace(result, certificate_note=notes[fqdn.text].result())
                    results.append(result)

        return results

    def run_techniques(self, fqdn):
        """Run each attribution technique on its own, plus the combined resolution.

        Parameters
        ----------
        fqdn : Fqdn, str
            The domain name

        Returns
        -------
        list[TechniqueOutcome]
            The ``whois``, ``certificate``, ``policy`` and ``combined`` outcomes, in that order

        Raises
        ------
        InvalidDomain
            ``fqdn`` is not a valid domain name or has no registrable form

        """
        if isinstance(fqdn, str):
            fqdn = parse_fqdn(fqdn)
        rd = registrable_domain(fqdn, self.rules)
        outcomes = []

        # WHOIS
        try:
            record = self.whois_client.query(rd)
            registrant = parse_registrant(record, self.redaction_lexicon)
            if registrant.kind is RegistrantKind.ORG:
                outcomes.append(TechniqueOutcome("whois", registrant.value, record.locator))
            else:
                outcomes.append(TechniqueOutcome("whois", None, REGISTRANT_FLAGS[registrant.kind]))
        except DomainHolderError as exc:
            outcomes.append(TechniqueOutcome("whois", None, whois_failed_flag(exc)))

        # Certificate
        try:
            summary = self.certificate_inspector.fetch_leaf_certificate(fqdn)
            outcomes.append(
                TechniqueOutcome("certificate", org_from_certificate(summary), classify_validation(summary).value)
            )
        except DomainHolderError as exc:
            outcomes.append(TechniqueOutcome("certificate", None, type(exc).__name__))

        # Privacy policy, without the redirect check
        flags = set()
        try:
            analysis, homepage = self.run_policy_path(rd, self.fetcher.new_budget(), flags)
        except DomainHolderError as exc:
            flags.add(policy_flag(type(exc).__name__))
            analysis, homepage = None, None
        if homepage is not None and homepage.cross_sld_redirect:
            flags.add(constants.FLAG_CROSS_SLD_REDIRECT)
        if analysis is not None:
            evidence = "{}#paragraph={}".format(analysis.url, analysis.paragraph_index)
            outcomes.append(TechniqueOutcome("policy", analysis.controller, " ".join([evidence] + sorted(flags))))
        else:
            outcomes.append(TechniqueOutcome("policy", None, " ".join(sorted(flags)) or None))

        result = self.resolve(fqdn)
        outcomes.append(
            TechniqueOutcome("combined", result.organization, result.evidence or " ".join(result.flags) or None)
        )
        return outcomes
