"""Registrant organization parsing with privacy-redaction filtering.

"""


from dataclasses import dataclass
import functools

from .. import constants
from ..constants import RegistrantKind
from ..names.org import load_word_list


@dataclass(frozen=True)
class RegistrantResult(object):
    """The classified registrant organization field.

    ``value`` is only set for :py:attr:`RegistrantKind.ORG` and :py:attr:`RegistrantKind.REDACTED`.

    """

    kind: RegistrantKind
    value: str = None


@dataclass(frozen=True)
class RedactionLexicon(object):
    """Lowercase substrings that mark a value as redacted."""

    entries: tuple

    def __post_init__(self):
        if not self.entries:
            raise ValueError("A redaction lexicon needs at least one entry")
        object.__setattr__(self, "entries", tuple(entry.casefold() for entry in self.entries))

    @classmethod
    def from_file(cls, path):
        """Load a lexicon with one entry per line."""
        return cls(load_word_list(path))


@functools.lru_cache(maxsize=None)
def default_redaction_lexicon():
    """Load the bundled redaction lexicon once."""
    return RedactionLexicon.from_file(constants.REDACTION_LEXICON_FILE)


def redaction_match(value, lexicon=None):
    """Whether any lexicon entry is a substring of the casefolded ``value``.

    Parameters
    ----------
    value : str
        A registrant organization value
    lexicon : RedactionLexicon, None
        The lexicon; defaults to the bundled one

    Returns
    -------
    bool
        Whether the value is redacted

    """
    lexicon = lexicon or default_redaction_lexicon()
    folded = (value or "").casefold()
    return any(entry in folded for entry in lexicon.entries)


def _find_registrant_value(text):
    """Return the value of the first registrant organization line in ``text``, or ``None``."""
    for line in text.splitlines():
        key, sep, value = line.partition(":")
        if sep and "".join(key.split()).lower() in constants.WHOIS_REGISTRANT_KEYS:
            return value.strip()
    return None


def parse_registrant(record, lexicon=None):
    """Classify the registrant organization of a WHOIS record.

    The last hop (the registrar's) is scanned first, then earlier hops.

    Parameters
    ----------
    record : WhoisRecord
        The WHOIS record
    lexicon : RedactionLexicon, None
        The redaction lexicon; defaults to the bundled one

    Returns
    -------
    RegistrantResult
        ``ABSENT`` if no hop has the field, ``EMPTY`` if its value is blank, ``REDACTED`` if the value hits the lexicon,
        and ``ORG`` otherwise

    """
    for _, text in reversed(record.hops):
        value = _find_registrant_value(text)
        if value is None:
            continue
        if not value:
            return RegistrantResult(RegistrantKind.EMPTY)
        if redaction_match(value, lexicon):
            return RegistrantResult(RegistrantKind.REDACTED, value)
        return RegistrantResult(RegistrantKind.ORG, value)

    return RegistrantResult(RegistrantKind.ABSENT)
