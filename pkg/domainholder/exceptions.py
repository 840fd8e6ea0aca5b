"""Exceptions for use throughout the code.

"""


class DomainHolderError(Exception):
    """Base class for all errors raised by this package."""


class LockNotAcquiredException(DomainHolderError):
    """The rate limiter lock could not be acquired."""


class ConfigError(DomainHolderError):
    """The configuration is invalid or references a missing file."""


class FormatError(DomainHolderError):
    """An input file could not be parsed.

    Parameters
    ----------
    message : str
        What went wrong
    path : str, None
        The file being parsed
    line_number : int, None
        The 1-based line number of the offending line

    """

    def __init__(self, message, path=None, line_number=None):
        self.path = path
        self.line_number = line_number
        if line_number is not None:
            message = "{}:{}: {}".format(path or "<input>", line_number, message)
        super().__init__(message)


# Domain names
class InvalidDomain(DomainHolderError):
    """A domain name could not be parsed or has no registrable form."""


class EmptyInput(InvalidDomain):
    """The domain name is empty after trimming."""


class IllegalLabel(InvalidDomain):
    """A DNS label is empty, too long, or contains forbidden characters."""


class IpLiteral(InvalidDomain):
    """The name is an IP address, not a domain name."""


class IsPublicSuffix(InvalidDomain):
    """The domain name is itself a public suffix."""


class NoLabels(InvalidDomain):
    """There are not enough labels to derive a registrable domain."""


class EmptyAfterNormalization(DomainHolderError):
    """An organization name consisted only of legal designators and punctuation."""


# Network I/O
class FetchError(DomainHolderError):
    """Base class for network transaction errors."""


class BudgetExhausted(FetchError):
    """The per-domain request budget has been used up.

    The ``partial`` attribute carries whatever evidence had been gathered when the budget ran out.

    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class FetchTimeout(FetchError):
    """A network transaction timed out."""


class TooManyRedirects(FetchError):
    """A redirect chain exceeded the configured maximum."""


class TransportFailure(FetchError):
    """A network transaction failed below the application protocol."""


class ReplayMiss(FetchError):
    """A transaction was not found in the fixture archive."""


class ArchiveCorrupt(FetchError):
    """The fixture archive is malformed."""


class ProviderUnavailable(FetchError):
    """The web-search provider could not be used."""


# WHOIS
class WhoisError(DomainHolderError):
    """Base class for WHOIS errors."""


class NoServerForTld(WhoisError):
    """There is no WHOIS server for the domain's TLD."""


class EmptyResponse(WhoisError):
    """The WHOIS server returned nothing."""


# TLS certificates
class CertificateError(DomainHolderError):
    """Base class for certificate retrieval errors."""


class NoTls(CertificateError):
    """The host does not accept TLS connections."""


class HandshakeFailure(CertificateError):
    """The TLS handshake failed."""


# Policy discovery
class DiscoveryError(DomainHolderError):
    """Base class for privacy policy discovery errors.

    The ``partial`` attribute carries whatever evidence had been gathered when discovery failed.

    """

    def __init__(self, message="", partial=None):
        super().__init__(message)
        self.partial = partial


class Unreachable(DiscoveryError):
    """No homepage could be found for the domain."""


class NoCandidates(DiscoveryError):
    """No privacy policy candidate URL was found."""


# Policy analysis
class PolicyStageError(DomainHolderError):
    """A stage of the policy analysis pipeline failed.

    Parameters
    ----------
    message : str
        What went wrong
    stage : str, None
        The pipeline stage; defaults to the class-level ``STAGE``

    """

    STAGE = "analysis"

    def __init__(self, message="", stage=None):
        super().__init__(message)
        self.stage = stage or self.STAGE


class EmptyDocument(PolicyStageError):
    """The page has no visible text paragraphs."""

    STAGE = "extract_text"


class TooShort(PolicyStageError):
    """The text is too short for language detection."""

    STAGE = "detect_language"


class Indeterminate(PolicyStageError):
    """The language could not be determined with enough margin."""

    STAGE = "detect_language"


class NotEnglish(PolicyStageError):
    """The text is not written in English."""

    STAGE = "detect_language"


class EmptyText(PolicyStageError):
    """There is no text to classify."""

    STAGE = "classify_policy"


class NotAPolicy(PolicyStageError):
    """The classifier rejected the text as a privacy policy."""

    STAGE = "classify_policy"


class NoQualifyingParagraphs(PolicyStageError):
    """No paragraph contains a controller keyword."""

    STAGE = "select_paragraphs"


class NoController(PolicyStageError):
    """No qualifying data controller candidate was found."""

    STAGE = "extract_controller"


# Classifier training
class TrainingError(DomainHolderError):
    """Base class for classifier training errors."""


class EmptyCorpus(TrainingError):
    """The training corpus is empty."""


class SingleClassCorpus(TrainingError):
    """The training corpus contains only one class."""


# Evaluation
class EvalError(DomainHolderError):
    """Base class for evaluation errors."""


class MissingTruth(EvalError):
    """A result has no ground-truth entry."""


class AllZero(EvalError):
    """All outcome counts are zero."""


# Audit
class AuditError(DomainHolderError):
    """Base class for audit errors."""


class MissingResolution(AuditError):
    """A flow destination has no resolution entry."""


class CycleDetected(AuditError):
    """The company relations contain a cycle."""


class AmbiguousParent(AuditError):
    """A company has more than one parent."""
