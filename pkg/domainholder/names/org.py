"""Organization-name normalization.

"""


from dataclasses import dataclass
import functools
import re

from .. import constants
from ..exceptions import EmptyAfterNormalization

#: Dotted abbreviations such as ``S.A.`` or ``B.V.``
REGEX_DOTTED_ABBREVIATION = re.compile(r"\b((?:\w\.){2,})")
REGEX_PUNCTUATION = re.compile(r"[^\w\s]|_")


@dataclass(frozen=True)
class NormalizedOrg(object):
    """An organization name reduced to a comparable form."""

    text: str
    original: str

    @property
    def tokens(self):
        """The normalized words."""
        return tuple(self.text.split())


def load_word_list(path):
    """Load a one-entry-per-line file, skipping blank lines and ``#`` comments.

    Parameters
    ----------
    path : str
        The path to the file

    Returns
    -------
    tuple
        The lowercased entries in file order

    """
    entries = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                entries.append(line.lower())
    return tuple(entries)


@functools.lru_cache(maxsize=None)
def default_designators():
    """Load the bundled legal-designator gazetteer.

    Returns
    -------
    frozenset
        The designators, lowercase and without punctuation

    """
    return frozenset(load_word_list(constants.LEGAL_DESIGNATORS_FILE))


def normalize_org(name, designators=None):
    """Normalize an organization name.

    The name is casefolded, punctuation is collapsed to single spaces, and trailing legal designators are removed.
    Normalizing the result again is a no-op.

    Parameters
    ----------
    name : str
        The organization name
    designators : frozenset, None
        The legal designators to strip; defaults to the bundled gazetteer

    Returns
    -------
    NormalizedOrg
        The normalized name

    Raises
    ------
    EmptyAfterNormalization
        Nothing is left after normalization

    """
    if designators is None:
        designators = default_designators()

    text = (name or "").casefold()
    text = REGEX_DOTTED_ABBREVIATION.sub(lambda match: match.group(1).replace(".", ""), text)
    tokens = REGEX_PUNCTUATION.sub(" ", text).split()

    while tokens and tokens[-1] in designators:
        tokens.pop()

    if not tokens:
        raise EmptyAfterNormalization("'{}' is empty after normalization".format(name))

    return NormalizedOrg(" ".join(tokens), name)


def same_organization(first, second, designators=None):
    """Judge whether two organization names refer to the same organization.

    The names match if their normalized forms are equal or the words of one are contained in the words of the other
    (``"Amazon"`` matches ``"Amazon Technologies, Inc."``).

    Parameters
    ----------
    first : str, NormalizedOrg
        An organization name
    second : str, NormalizedOrg
        Another organization name
    designators : frozenset, None
        The legal designators to strip; defaults to the bundled gazetteer

    Returns
    -------
    bool
        Whether the names match

    """
    if not isinstance(first, NormalizedOrg):
        first = normalize_org(first, designators)
    if not isinstance(second, NormalizedOrg):
        second = normalize_org(second, designators)

    if first.text == second.text:
        return True

    first_tokens, second_tokens = set(first.tokens), set(second.tokens)
    return first_tokens <= second_tokens or second_tokens <= first_tokens
