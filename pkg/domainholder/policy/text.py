"""Plain-text extraction from policy pages.

"""


from dataclasses import dataclass

from bs4 import BeautifulSoup

from .. import constants
from ..exceptions import EmptyDocument


@dataclass(frozen=True)
class PolicyText(object):
    """The visible text of a page, split into paragraphs."""

    url: str
    paragraphs: tuple

    @property
    def full_text(self):
        """The paragraphs joined by blank lines."""
        return "\n\n".join(self.paragraphs)


def _normalize_paragraph(text):
    text = constants.REGEX_TAG_REMNANT.sub(" ", text)
    return constants.REGEX_WHITESPACE.sub(" ", text).strip()


def extract_text(html, url=None):
    """Extract the paragraphs of visible text from a page.

    Script, style, navigation, header and footer subtrees are dropped.  Block-level elements and blank lines delimit
    paragraphs, whitespace is collapsed, and paragraphs of fewer than three tokens are dropped.

    Parameters
    ----------
    html : bytes, str
        The page; undecodable bytes are tolerated
    url : str, None
        The page URL

    Returns
    -------
    PolicyText
        The extracted paragraphs

    Raises
    ------
    EmptyDocument
        No paragraph is left

    """
    if isinstance(html, bytes):
        html = html.decode("utf-8", errors="replace")

    soup = BeautifulSoup(html, "html.parser")
    # one at a time, since dropping a subtree also drops the dropped tags nested in it
    tag = soup.find(constants.DROPPED_TAGS)
    while tag is not None:
        tag.decompose()
        tag = soup.find(constants.DROPPED_TAGS)

    for br in soup.find_all("br"):
        br.replace_with("\n")

    for block in soup.find_all(constants.BLOCK_TAGS):
        block.insert_before("\n\n")
        block.insert_after("\n\n")

    paragraphs = []
    for chunk in constants.REGEX_PARAGRAPH_BREAK.split(soup.get_text()):
        paragraph = _normalize_paragraph(chunk)
        if len(paragraph.split()) >= constants.MIN_PARAGRAPH_TOKENS:
            paragraphs.append(paragraph)

    if not paragraphs:
        raise EmptyDocument("No text paragraphs in {}".format(url or "the page"))

    return PolicyText(url, tuple(paragraphs))


def split_text(text, url=None):
    """Split plain text into paragraphs at blank lines, with the same clean-up as :py:func:`extract_text`.

    Raises
    ------
    EmptyDocument
        No paragraph is left

    """
    paragraphs = []
    for chunk in constants.REGEX_PARAGRAPH_BREAK.split(text):
        paragraph = _normalize_paragraph(chunk)
        if len(paragraph.split()) >= constants.MIN_PARAGRAPH_TOKENS:
            paragraphs.append(paragraph)

    if not paragraphs:
        raise EmptyDocument("No text paragraphs in {}".format(url or "the text"))

    return PolicyText(url, tuple(paragraphs))
