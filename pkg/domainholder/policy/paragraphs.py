"""Keyword-based selection of the paragraphs likely to name the data controller.

"""


from dataclasses import dataclass
import functools
import re

from .. import constants
from ..exceptions import FormatError, NoQualifyingParagraphs


@dataclass(frozen=True)
class ScoredParagraph(object):
    """A paragraph, its position in the policy, and its keyword score."""

    index: int
    text: str
    score: float


class ControllerLexicon(object):
    """Weighted keywords found near data controller disclosures.

    Multi-word keywords match as substrings of the casefolded paragraph; single words match on word boundaries.

    Parameters
    ----------
    keywords : Iterable[tuple]
        ``(keyword, weight)`` pairs

    """

    def __init__(self, keywords):
        self.keywords = tuple((keyword.casefold(), float(weight)) for keyword, weight in keywords)
        if not self.keywords:
            raise ValueError("A controller lexicon needs at least one keyword")

        self._patterns = tuple(
            (re.compile(r"\b{}\b".format(re.escape(keyword))) if " " not in keyword else None, weight, keyword)
            for keyword, weight in self.keywords
        )

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
                if not sep or not keyword.strip():
                    raise FormatError("expected 'keyword<TAB>weight'", path, line_number)
                try:
                    keywords.append((keyword.strip(), float(weight)))
                except ValueError as exc:
                    raise FormatError("invalid weight '{}'".format(weight), path, line_number) from exc
        return cls(keywords)

    def score(self, paragraph):
        """The summed weight of the keywords present in ``paragraph``."""
        folded = " ".join(paragraph.casefold().split())
        total = 0.0
        for pattern, weight, keyword in self._patterns:
            if (pattern.search(folded) if pattern is not None else keyword in folded):
                total += weight
        return total


@functools.lru_cache(maxsize=None)
def default_controller_lexicon():
    """Load the bundled controller lexicon once."""
    return ControllerLexicon.from_file(constants.CONTROLLER_LEXICON_FILE)


def select_paragraphs(policy, lexicon=None, limit=constants.MAX_SELECTED_PARAGRAPHS):
    """Select the paragraphs most likely to disclose the data controller.

    Parameters
    ----------
    policy : PolicyText
        The policy
    lexicon : ControllerLexicon, None
        The keywords; defaults to the bundled lexicon
    limit : int
        The maximum number of paragraphs returned

    Returns
    -------
    list[ScoredParagraph]
        Paragraphs with a positive score, best first; ties keep document order

    Raises
    ------
    NoQualifyingParagraphs
        No paragraph contains a keyword

    """
    lexicon = lexicon or default_controller_lexicon()
    scored = [ScoredParagraph(index, text, lexicon.score(text)) for index, text in enumerate(policy.paragraphs)]
    selected = sorted((paragraph for paragraph in scored if paragraph.score > 0), key=lambda p: -p.score)

    if not selected:
        raise NoQualifyingParagraphs("No paragraph mentions a controller keyword")
    return selected[:limit]
