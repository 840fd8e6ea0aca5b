"""Constants used throughout the code.

**Links**

* `Public Suffix List <https://publicsuffix.org/list/>`_
* `WHOIS protocol (RFC 3912) <https://www.rfc-editor.org/rfc/rfc3912>`_
* `CA/Browser Forum EV guidelines <https://cabforum.org/extended-validation/>`_

"""


from enum import Enum, unique
import os
import re


# ======================================================================= #
#                                                                         #
#                                 Enums                                   #
#                                                                         #
# ======================================================================= #
@unique
class FixtureMode(Enum):
    """How the fixture store handles network transactions."""

    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


@unique
class TransactionKind(Enum):
    """The kinds of network transactions that pass through the fixture store."""

    HTTP = "http"
    SEARCH = "search"
    TLS = "tls"
    WHOIS = "whois"


@unique
class Method(Enum):
    """How an organization was attributed to a domain."""

    POLICY = "policy"
    WHOIS = "whois"
    UNIDENTIFIED = "unidentified"


@unique
class RegistrantKind(Enum):
    """Classification of the WHOIS registrant organization field."""

    ORG = "org"
    REDACTED = "redacted"
    ABSENT = "absent"
    EMPTY = "empty"


@unique
class ValidationClass(Enum):
    """TLS certificate validation classes."""

    EV = "EV"
    OV = "OV"
    DV = "DV"


@unique
class HomepageSource(Enum):
    """Where a homepage URL came from."""

    DIRECT_REQUEST = "direct_request"
    SEARCH_ENGINE = "search_engine"


@unique
class CandidateSource(Enum):
    """Where a privacy policy candidate URL came from."""

    HOMEPAGE_LINK = "homepage_link"
    SEARCH_RESULT = "search_result"


@unique
class Outcome(Enum):
    """Evaluation outcomes; there are no true negatives because every domain has a holder."""

    TP = "TP"
    FP = "FP"
    FN = "FN"


@unique
class DisclosureStatus(Enum):
    """Whether an app's policy names the organizations receiving its data."""

    FULL = "full"
    PARTIAL = "partial"
    NONE = "none"


# Result flags
FLAG_CROSS_SLD_REDIRECT = "CrossSldRedirect"
FLAG_POLICY_STAGE_FAILED = "PolicyStageFailed"
FLAG_WHOIS_REDACTED = "WhoisRedacted"
FLAG_WHOIS_ABSENT = "WhoisAbsent"
FLAG_WHOIS_EMPTY = "WhoisEmpty"
FLAG_WHOIS_FAILED = "WhoisFailed"
FLAG_INVALID_DOMAIN = "InvalidDomain"
FLAG_TIMED_OUT = "TimedOut"

# Policy pipeline stage names
STAGE_RESOLVE_HOMEPAGE = "resolve_homepage"
STAGE_FIND_LINKS = "find_policy_links"
STAGE_SEARCH_POLICY = "search_policy"
STAGE_FETCH_CANDIDATE = "fetch_candidate"
STAGE_BUDGET = "budget"
STAGE_EXTRACT_TEXT = "extract_text"
STAGE_DETECT_LANGUAGE = "detect_language"
STAGE_CLASSIFY = "classify_policy"
STAGE_SELECT_PARAGRAPHS = "select_paragraphs"
STAGE_EXTRACT_CONTROLLER = "extract_controller"


# ======================================================================= #
#                                                                         #
#                              Bundled data                               #
#                                                                         #
# ======================================================================= #
DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")

PUBLIC_SUFFIX_FILE = os.path.join(DATA_DIR, "public_suffix_list.dat")
LEGAL_DESIGNATORS_FILE = os.path.join(DATA_DIR, "legal_designators.txt")
TLD_SERVERS_FILE = os.path.join(DATA_DIR, "tld_servers.tsv")
REDACTION_LEXICON_FILE = os.path.join(DATA_DIR, "redaction_lexicon.txt")
LINK_LEXICON_FILE = os.path.join(DATA_DIR, "link_lexicon.tsv")
CONTROLLER_LEXICON_FILE = os.path.join(DATA_DIR, "controller_lexicon.tsv")
TRIGGER_PHRASES_FILE = os.path.join(DATA_DIR, "trigger_phrases.txt")
GENERIC_CANDIDATES_FILE = os.path.join(DATA_DIR, "generic_candidates.txt")
KNOWN_ORGS_FILE = os.path.join(DATA_DIR, "known_orgs.txt")
EV_OIDS_FILE = os.path.join(DATA_DIR, "ev_oids.txt")
LANGUAGE_PROFILE_DIR = os.path.join(DATA_DIR, "languages")
CORPUS_DIR = os.path.join(DATA_DIR, "corpus")
CORPUS_LABELS_FILE = "labels.tsv"


# ======================================================================= #
#                                                                         #
#                                 Fetching                                #
#                                                                         #
# ======================================================================= #
#: Maximum number of HTTP requests to one registrable domain during one resolution
DEFAULT_MAX_REQUESTS_PER_DOMAIN = 5

#: Default connect timeout (in s) for HTTP requests
DEFAULT_CONNECT_TIMEOUT_S = 10.0

#: Default total timeout (in s) for HTTP requests
DEFAULT_TOTAL_TIMEOUT_S = 30.0

DEFAULT_MAX_REDIRECTS = 10
DEFAULT_ACCEPT_LANGUAGE = "en"
DEFAULT_USER_AGENT = (
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) "
    "Chrome/120.0.0.0 Safari/537.36"
)

#: Minimum interval (in s) between two live transactions to the same host
DEFAULT_RATE_LIMIT_INTERVAL_S = 1.0

#: Default timeout for acquiring the lock that protects the rate limiter
DEFAULT_LOCK_TIMEOUT_S = 3.0

REDIRECT_STATUS_CODES = (301, 302, 303, 307, 308)

#: Name of the index file inside a fixture archive
FIXTURE_INDEX_FILE = "index.tsv"

#: File extension of each archived transaction, by kind
FIXTURE_EXTENSIONS = {
    TransactionKind.HTTP: ".http",
    TransactionKind.SEARCH: ".json",
    TransactionKind.TLS: ".der",
    TransactionKind.WHOIS: ".txt",
}

#: File extension of an archived transaction that failed while recording
FIXTURE_ERROR_EXTENSION = ".err"

# Search provider
DEFAULT_SEARCH_PROVIDER = "google-cse"
DEFAULT_SEARCH_ENDPOINT = "https://www.googleapis.com/customsearch/v1"
DEFAULT_SEARCH_CREDENTIAL_ENV = "DOMAINHOLDER_SEARCH_KEY"
DEFAULT_SEARCH_ENGINE_ENV = "DOMAINHOLDER_SEARCH_ENGINE"
DEFAULT_SEARCH_RESULT_LIMIT = 10

#: Default limit (in s) on one resolution in the async resolver
DEFAULT_RESOLVE_TIMEOUT_S = 300.0

#: Default evidence cache time-to-live (30 days)
DEFAULT_CACHE_TTL_S = 30 * 24 * 60 * 60


# ======================================================================= #
#                                                                         #
#                              WHOIS and TLS                              #
#                                                                         #
# ======================================================================= #
WHOIS_PORT = 43
WHOIS_MAX_HOPS = 3
DEFAULT_WHOIS_TIMEOUT_S = 10.0

#: Value in the TLD server map for TLDs that have no WHOIS service
WHOIS_NO_SERVER = "NONE"

#: Registrant organization keys, lowercased with spaces removed
WHOIS_REGISTRANT_KEYS = ("registrantorganization", "registrantorganisation")

REGEX_WHOIS_REFERRAL = re.compile(
    r"^\s*(?:registrar whois server|whois server|refer)\s*:\s*(?P<server>\S+)\s*$", re.IGNORECASE | re.MULTILINE
)

TLS_PORT = 443
DEFAULT_TLS_TIMEOUT_S = 10.0


# ======================================================================= #
#                                                                         #
#                             Policy analysis                             #
#                                                                         #
# ======================================================================= #
#: At most this many candidates per discovery source are fetched and analysed
MAX_CANDIDATES_PER_SOURCE = 2

#: Weight factor applied to link keywords that only match the URL path
PATH_MATCH_FACTOR = 0.5

#: Subtrees dropped before text extraction
DROPPED_TAGS = ("script", "style", "nav", "header", "footer", "noscript", "template", "svg", "iframe", "head")

#: Elements whose boundaries delimit paragraphs
BLOCK_TAGS = (
    "address", "article", "aside", "blockquote", "dd", "div", "dl", "dt", "fieldset", "figcaption",
    "figure", "form", "h1", "h2", "h3", "h4", "h5", "h6", "hr", "li", "main", "ol", "p", "pre",
    "section", "table", "tbody", "td", "tfoot", "th", "thead", "tr", "ul",
)  # fmt: skip

MIN_PARAGRAPH_TOKENS = 3
MIN_LANGUAGE_CHARS = 50
DEFAULT_LANGUAGE_MARGIN = 0.02
LANGUAGE_ENGLISH = "en"
MAX_SELECTED_PARAGRAPHS = 5

REGEX_PARAGRAPH_BREAK = re.compile(r"\n\s*\n")
REGEX_WHITESPACE = re.compile(r"\s+")
REGEX_TAG_REMNANT = re.compile(r"<[^<>]*>")
REGEX_WORD = re.compile(r"\w+", re.UNICODE)

# Classifier
MODEL_FORMAT = "domainholder-policy-classifier"
MODEL_VERSION = 1
DEFAULT_LOSS = "modified_huber"
DEFAULT_ALPHA = 1e-3
DEFAULT_EPOCHS = 50
DEFAULT_SEED = 42
DEFAULT_TOKEN_PATTERN = r"(?u)\b\w\w+\b"
DEFAULT_MAX_VOCABULARY = 20000
DEFAULT_THRESHOLD = 0.0
DEFAULT_HOLDOUT_SIZE = 30
LABEL_POLICY = "policy"
LABEL_OTHER = "other"

# Controller extraction scores
SCORE_TRIGGER = 3
SCORE_ALIAS = 3
SCORE_DESIGNATOR = 2

#: Alias list after a candidate name, e.g. ``("TikTok", "we" or "us")``
REGEX_ALIAS = re.compile(r"\A\s*\((?P<aliases>[^()]{0,200})\)")

#: Quoted alias inside an alias list
REGEX_QUOTED = re.compile(r"[\"“”‘’'](?P<alias>[^\"“”‘’']{1,40})[\"“”‘’']")

#: Aliases that mark the candidate as the party speaking in the policy
SELF_ALIASES = ("we", "us")

#: Leading words stripped from a capitalized candidate
CANDIDATE_LEADING_STOPWORDS = (
    "a", "an", "any", "as", "at", "by", "for", "from", "if", "in", "our", "please", "the", "these",
    "this", "to", "us", "we", "welcome", "when", "where", "with", "you", "your",
)  # fmt: skip

#: Pronouns that never qualify as a controller on their own
PRONOUNS = ("i", "it", "our", "ours", "they", "us", "we", "you", "your")

CONNECTOR_WORDS = ("of", "and", "&")


# ======================================================================= #
#                                                                         #
#                                   CLI                                   #
#                                                                         #
# ======================================================================= #
EXIT_OK = 0
EXIT_UNIDENTIFIED = 1
EXIT_USAGE = 2

#: Exit code of `fixtures verify` when the archive has problems
EXIT_ARCHIVE_PROBLEMS = 1

CONFIG_SECTION = "domainholder"
