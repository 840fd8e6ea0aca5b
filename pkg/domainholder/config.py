"""Configuration loading and validation.

A configuration file is an INI file with a single ``[domainholder]`` section; every key is optional::

    [domainholder]
    max_requests_per_domain = 5
    search_provider = google-cse
    search_credential_env = DOMAINHOLDER_SEARCH_KEY
    fixture_mode = replay
    fixture_archive = fixtures/archive

Relative paths are resolved against the directory of the configuration file.  The search credential itself must never
appear in the file, only the name of the environment variable that holds it.

"""


import configparser
from dataclasses import dataclass, fields
import logging
import os

from . import constants
from .certinfo.certificate import CertificateInspector, default_ev_oids
from .constants import FixtureMode
from .exceptions import ConfigError
from .fetch_manager.evidence_cache import EvidenceCache
from .fetch_manager.fetch_manager_sync import FetchPolicy, HostRateLimiter
from .fetch_manager.fixture_store import FixtureStore
from .fetch_manager.search import GoogleCustomSearchProvider
from .names.domain import SuffixRules, default_suffix_rules
from .names.org import default_designators, load_word_list
from .policy.analysis import PolicyAnalyzer
from .policy.classifier import PolicyClassifier, default_classifier, load_corpus, train_classifier
from .policy.discovery import LinkLexicon, default_link_lexicon
from .policy.entities import EntityRules, RuleBasedEntityExtractor, default_entity_rules
from .policy.language import LanguageDetector, default_language_detector
from .policy.paragraphs import ControllerLexicon, default_controller_lexicon
from .resolver.resolver_sync import AttributionResolverSync
from .whois.registrant import RedactionLexicon, default_redaction_lexicon
from .whois.whois_client import TldServerMap, WhoisClient, default_tld_servers

_LOGGER = logging.getLogger(__name__)

#: Keys that would hold a secret; they are rejected
FORBIDDEN_KEYS = ("search_key", "search_credential", "api_key", "credential", "password", "token")

#: Keys holding a file path that must exist
FILE_KEYS = (
    "public_suffix_file",
    "legal_designators_file",
    "tld_servers_file",
    "redaction_lexicon_file",
    "link_lexicon_file",
    "controller_lexicon_file",
    "trigger_phrases_file",
    "generic_candidates_file",
    "known_orgs_file",
    "ev_oids_file",
    "classifier_model",
)

#: Keys holding a directory path that must exist
DIRECTORY_KEYS = ("language_profile_dir", "corpus_dir")

SEARCH_PROVIDERS = ("none", constants.DEFAULT_SEARCH_PROVIDER)


@dataclass(frozen=True)
class Config(object):
    """The settings for one run.

    Paths left as ``None`` use the bundled data.

    """

    # fetch policy
    max_requests_per_domain: int = constants.DEFAULT_MAX_REQUESTS_PER_DOMAIN
    connect_timeout_s: float = constants.DEFAULT_CONNECT_TIMEOUT_S
    total_timeout_s: float = constants.DEFAULT_TOTAL_TIMEOUT_S
    max_redirects: int = constants.DEFAULT_MAX_REDIRECTS
    accept_language: str = constants.DEFAULT_ACCEPT_LANGUAGE
    user_agent: str = constants.DEFAULT_USER_AGENT
    rate_limit_interval_s: float = constants.DEFAULT_RATE_LIMIT_INTERVAL_S
    whois_timeout_s: float = constants.DEFAULT_WHOIS_TIMEOUT_S
    tls_timeout_s: float = constants.DEFAULT_TLS_TIMEOUT_S

    # bundled data overrides
    public_suffix_file: str = None
    legal_designators_file: str = None
    tld_servers_file: str = None
    redaction_lexicon_file: str = None
    link_lexicon_file: str = None
    controller_lexicon_file: str = None
    trigger_phrases_file: str = None
    generic_candidates_file: str = None
    known_orgs_file: str = None
    ev_oids_file: str = None
    language_profile_dir: str = None
    classifier_model: str = None
    corpus_dir: str = None

    # search provider
    search_provider: str = constants.DEFAULT_SEARCH_PROVIDER
    search_credential_env: str = constants.DEFAULT_SEARCH_CREDENTIAL_ENV
    search_engine_env: str = constants.DEFAULT_SEARCH_ENGINE_ENV
    search_result_limit: int = constants.DEFAULT_SEARCH_RESULT_LIMIT

    # evidence cache and fixtures
    cache_dir: str = None
    cache_ttl_s: float = constants.DEFAULT_CACHE_TTL_S
    fixture_mode: FixtureMode = FixtureMode.LIVE
    fixture_archive: str = None

    def __post_init__(self):
        for key in FILE_KEYS:
            path = getattr(self, key)
            if path is not None and not os.path.isfile(path):
                raise ConfigError("'{}' refers to a missing file: {}".format(key, path))

        for key in DIRECTORY_KEYS:
            path = getattr(self, key)
            if path is not None and not os.path.isdir(path):
                raise ConfigError("'{}' refers to a missing directory: {}".format(key, path))

        if self.search_provider not in SEARCH_PROVIDERS:
            raise ConfigError(
                "Unknown search provider '{}'; expected one of {}".format(self.search_provider, ", ".join(SEARCH_PROVIDERS))
            )

        if self.search_result_limit < 1:
            raise ConfigError("`search_result_limit` must be at least 1")

        if self.cache_ttl_s <= 0:
            raise ConfigError("`cache_ttl_s` must be positive")

        if self.fixture_mode is not FixtureMode.LIVE and not self.fixture_archive:
            raise ConfigError("`fixture_archive` is required in {} mode".format(self.fixture_mode.value))

        # validate the fetch policy values now rather than when the resolver is built
        self.fetch_policy()

    # ======================================================================= #
    #                                                                         #
    #                                 Loading                                 #
    #                                                                         #
    # ======================================================================= #
    @classmethod
    def from_dict(cls, values, base_dir=None):
        """Build a config from string values, as read from a configuration file.

        Parameters
        ----------
        values : dict
            ``key -> value`` strings
        base_dir : str, None
            Relative paths are resolved against this directory

        Raises
        ------
        ConfigError
            A key is unknown or forbidden, or a value is invalid

        """
        types = {field.name: field.type for field in fields(cls)}
        kwargs = {}
        for key, value in values.items():
            key = key.strip().lower()
            if key in FORBIDDEN_KEYS:
                raise ConfigError(
                    "'{}' must not be stored in a configuration file; set `search_credential_env` to the name of an "
                    "environment variable instead".format(key)
                )
            if key not in types:
                raise ConfigError("Unknown configuration key '{}'".format(key))

            value = value.strip()
            try:
                if types[key] is int:
                    kwargs[key] = int(value)
                elif types[key] is float:
                    kwargs[key] = float(value)
                elif types[key] is FixtureMode:
                    kwargs[key] = FixtureMode(value.lower())
                elif key in FILE_KEYS or key in DIRECTORY_KEYS or key in ("cache_dir", "fixture_archive"):
                    kwargs[key] = os.path.join(base_dir, value) if base_dir and value else value or None
                else:
                    kwargs[key] = value
            except ValueError as exc:
                raise ConfigError("Invalid value for '{}': {!r}".format(key, value)) from exc

        try:
            return cls(**kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path=None):
        """Load a configuration file, or the defaults if ``path`` is ``None``.

        Raises
        ------
        ConfigError
            The file can't be read or parsed, or a value is invalid

        """
        if path is None:
            return cls()

        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as f:
                parser.read_file(f)
        except OSError as exc:
            raise ConfigError("Can't read configuration file '{}': {}".format(path, exc)) from exc
        except configparser.Error as exc:
            raise ConfigError("Invalid configuration file '{}': {}".format(path, exc)) from exc

        unknown = [section for section in parser.sections() if section != constants.CONFIG_SECTION]
        if unknown:
            raise ConfigError("Unknown section(s) in '{}': {}".format(path, ", ".join(unknown)))

        values = dict(parser[constants.CONFIG_SECTION]) if parser.has_section(constants.CONFIG_SECTION) else {}
        _LOGGER.debug("Loaded %d settings from %s", len(values), path)
        return cls.from_dict(values, os.path.dirname(os.path.abspath(path)))

    def with_fixture_mode(self, mode, archive=None):
        """Get a copy of this config with a different fixture mode."""
        values = {field.name: getattr(self, field.name) for field in fields(self)}
        values["fixture_mode"] = FixtureMode(mode)
        if archive is not None:
            values["fixture_archive"] = archive
        try:
            return type(self)(**values)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    # ======================================================================= #
    #                                                                         #
    #                                 Builders                                #
    #                                                                         #
    # ======================================================================= #
    def fetch_policy(self):
        """Build the :py:class:`~domainholder.fetch_manager.fetch_manager_sync.FetchPolicy`."""
        return FetchPolicy(
            max_requests_per_domain=self.max_requests_per_domain,
            connect_timeout_s=self.connect_timeout_s,
            total_timeout_s=self.total_timeout_s,
            max_redirects=self.max_redirects,
            accept_language=self.accept_language,
            user_agent=self.user_agent,
            rate_limit_interval_s=self.rate_limit_interval_s,
        )

    def build_store(self):
        """Build the fixture store, with an evidence cache in live mode if ``cache_dir`` is set."""
        cache = None
        if self.fixture_mode is FixtureMode.LIVE and self.cache_dir:
            cache = EvidenceCache(self.cache_dir, self.cache_ttl_s)
        return FixtureStore(self.fixture_mode, self.fixture_archive, cache)

    def build_suffix_rules(self):
        """Load the public-suffix rules."""
        return SuffixRules(self.public_suffix_file) if self.public_suffix_file else default_suffix_rules()

    def build_provider(self):
        """Build the search provider, or ``None`` if search is disabled."""
        if self.search_provider == "none":
            return None
        return GoogleCustomSearchProvider(
            credential_env=self.search_credential_env,
            engine_env=self.search_engine_env,
            result_limit=self.search_result_limit,
            timeout_s=self.total_timeout_s,
        )

    def build_designators(self):
        """Load the legal designators stripped from organization names."""
        if self.legal_designators_file:
            return frozenset(load_word_list(self.legal_designators_file))
        return default_designators()

    def build_entity_rules(self):
        """Load the extractor word lists."""
        if not any((self.legal_designators_file, self.trigger_phrases_file, self.generic_candidates_file, self.known_orgs_file)):
            return default_entity_rules()
        return EntityRules.from_files(
            self.legal_designators_file or constants.LEGAL_DESIGNATORS_FILE,
            self.trigger_phrases_file or constants.TRIGGER_PHRASES_FILE,
            self.generic_candidates_file or constants.GENERIC_CANDIDATES_FILE,
            self.known_orgs_file or constants.KNOWN_ORGS_FILE,
        )

    def build_redaction_lexicon(self):
        """Load the WHOIS redaction lexicon."""
        if self.redaction_lexicon_file:
            return RedactionLexicon.from_file(self.redaction_lexicon_file)
        return default_redaction_lexicon()

    def build_ev_oids(self):
        """Load the EV policy OIDs."""
        return frozenset(load_word_list(self.ev_oids_file)) if self.ev_oids_file else default_ev_oids()

    def build_classifier(self):
        """Load the classifier model, or train one on the configured corpus."""
        if self.classifier_model:
            return PolicyClassifier.load(self.classifier_model)
        if self.corpus_dir:
            return train_classifier(load_corpus(self.corpus_dir))
        return default_classifier()

    def build_analyzer(self):
        """Build the policy analysis pipeline."""
        detector = (
            LanguageDetector(self.language_profile_dir) if self.language_profile_dir else default_language_detector()
        )
        lexicon = (
            ControllerLexicon.from_file(self.controller_lexicon_file)
            if self.controller_lexicon_file
            else default_controller_lexicon()
        )
        return PolicyAnalyzer(self.build_classifier(), detector, lexicon, RuleBasedEntityExtractor(self.build_entity_rules()))

    def build_resolver(self, store=None, compare_certificates=False):
        """Build the sync resolver with every service this config describes.

        Parameters
        ----------
        store : FixtureStore, None
            The fixture store; built from this config if not provided
        compare_certificates : bool
            Whether to attach certificate notes

        Returns
        -------
        AttributionResolverSync
            The resolver

        """
        store = store or self.build_store()
        rate_limiter = HostRateLimiter(self.rate_limit_interval_s)
        tld_servers = TldServerMap(self.tld_servers_file) if self.tld_servers_file else default_tld_servers()
        link_lexicon = LinkLexicon.from_file(self.link_lexicon_file) if self.link_lexicon_file else default_link_lexicon()

        return AttributionResolverSync(
            store,
            fetch_policy=self.fetch_policy(),
            provider=self.build_provider(),
            analyzer=self.build_analyzer(),
            whois_client=WhoisClient(store, tld_servers, self.whois_timeout_s, rate_limiter=rate_limiter),
            certificate_inspector=CertificateInspector(store, self.tls_timeout_s, rate_limiter=rate_limiter),
            rules=self.build_suffix_rules(),
            redaction_lexicon=self.build_redaction_lexicon(),
            link_lexicon=link_lexicon,
            compare_certificates=compare_certificates,
            rate_limiter=rate_limiter,
        )
