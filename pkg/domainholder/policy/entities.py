"""Rule-based organization extraction from policy paragraphs.

Candidates are maximal runs of capitalized tokens (allowing internal "of", "and", "&", digits and a trailing legal
designator).  :py:class:`RuleBasedEntityExtractor` scores them to pick the single data controller, and
:py:func:`disclosed_entities` keeps every candidate that looks like an organization.

"""


from dataclasses import dataclass
import functools
import logging
import re

from .. import constants
from ..exceptions import EmptyAfterNormalization, NoController
from ..names.org import default_designators, load_word_list, normalize_org

_LOGGER = logging.getLogger(__name__)

REGEX_TOKEN = re.compile(r"(?:[A-Za-z]\.){2,}|[\w][\w'’\-]*|&")
REGEX_DESIGNATOR_GAP = re.compile(r"\A,\s+\Z")


@dataclass(frozen=True)
class EntityRules(object):
    """The word lists used by the extractor."""

    designators: frozenset
    triggers: tuple
    generic: frozenset
    known_orgs: frozenset

    def __post_init__(self):
        if not self.designators or not self.triggers:
            raise ValueError("The designator gazetteer and trigger phrases must not be empty")

    @classmethod
    def from_files(
        cls,
        designators_path=constants.LEGAL_DESIGNATORS_FILE,
        triggers_path=constants.TRIGGER_PHRASES_FILE,
        generic_path=constants.GENERIC_CANDIDATES_FILE,
        known_orgs_path=constants.KNOWN_ORGS_FILE,
    ):
        """Load the rules from one-entry-per-line files."""
        return cls(
            frozenset(load_word_list(designators_path)),
            load_word_list(triggers_path),
            frozenset(load_word_list(generic_path)),
            frozenset(load_word_list(known_orgs_path)),
        )


@functools.lru_cache(maxsize=None)
def default_entity_rules():
    """Load the bundled rules once."""
    return EntityRules(
        default_designators(),
        load_word_list(constants.TRIGGER_PHRASES_FILE),
        frozenset(load_word_list(constants.GENERIC_CANDIDATES_FILE)),
        frozenset(load_word_list(constants.KNOWN_ORGS_FILE)),
    )


@dataclass(frozen=True)
class Candidate(object):
    """A capitalized token run found in a paragraph.

    ``start`` and ``end`` are character offsets in the paragraph.  ``evidence`` is the score from trigger, alias and
    designator rules; ``score`` adds the paragraph-rank bonus.

    """

    text: str
    paragraph_rank: int
    paragraph_index: int
    start: int
    end: int
    trigger: str = None
    alias: bool = False
    designator: bool = False
    evidence: int = 0
    score: int = 0


@dataclass(frozen=True)
class ControllerExtraction(object):
    """The chosen data controller and every scored candidate."""

    controller: str
    candidates: tuple
    paragraph_index: int


def _is_designator(token, rules):
    return token.replace(".", "").casefold() in rules.designators


def _is_capitalized(token):
    return token[0].isupper()


def generate_candidates(paragraph, rules):
    """Find the capitalized token runs in a paragraph.

    Parameters
    ----------
    paragraph : str
        The paragraph text
    rules : EntityRules
        The extractor rules

    Returns
    -------
    list[tuple]
        ``(text, start, end)`` for each run, leading stopwords stripped; ``end`` includes a designator's final period

    """
    tokens = [(match.group(), match.start(), match.end()) for match in REGEX_TOKEN.finditer(paragraph)]
    runs = []
    i = 0
    while i < len(tokens):
        if not _is_capitalized(tokens[i][0]):
            i += 1
            continue

        run = [tokens[i]]
        j = i + 1
        while j < len(tokens):
            token, start, _ = tokens[j]
            gap = paragraph[run[-1][2] : start]
            if gap.strip():
                # ", Inc." keeps the run going, any other punctuation ends it
                if REGEX_DESIGNATOR_GAP.match(gap) and _is_capitalized(token) and _is_designator(token, rules):
                    run.append(tokens[j])
                    j += 1
                break
            if _is_capitalized(token) or token.isdigit():
                run.append(tokens[j])
                j += 1
                continue
            if token.casefold() in constants.CONNECTOR_WORDS and j + 1 < len(tokens):
                following, following_start, _ = tokens[j + 1]
                if _is_capitalized(following) and not paragraph[tokens[j][2] : following_start].strip():
                    run.extend(tokens[j : j + 2])
                    j += 2
                    continue
            break

        i = j

        while run and run[0][0].casefold() in constants.CANDIDATE_LEADING_STOPWORDS:
            run.pop(0)
        while run and run[-1][0].casefold() in constants.CONNECTOR_WORDS:
            run.pop()
        if not run:
            continue

        start, end = run[0][1], run[-1][2]
        if _is_designator(run[-1][0], rules) and paragraph[end : end + 1] == "." and not run[-1][0].endswith("."):
            end += 1
        runs.append((" ".join(paragraph[start:end].split()), start, end))

    return runs


def _excluded(text, rules):
    """Whether a candidate is a pronoun, a generic phrase, or nothing but designators."""
    folded = " ".join(text.casefold().split())
    if folded in constants.PRONOUNS or folded in rules.generic:
        return True
    try:
        normalize_org(text, rules.designators)
    except EmptyAfterNormalization:
        return True
    return False


def _preceding_trigger(paragraph, start, rules):
    before = " ".join(paragraph[:start].casefold().split())
    for trigger in rules.triggers:
        if before == trigger or before.endswith(" " + trigger):
            return trigger
    return None


def _has_self_alias(paragraph, end):
    match = constants.REGEX_ALIAS.match(paragraph[end:])
    if not match:
        return False
    aliases = constants.REGEX_QUOTED.finditer(match.group("aliases"))
    return any(alias.group("alias").strip().casefold() in constants.SELF_ALIASES for alias in aliases)


class EntityExtractor(object):
    """Pick the data controller from the selected paragraphs of a policy."""

    def extract_controller(self, paragraphs):
        """Extract the single data controller.

        Parameters
        ----------
        paragraphs : Sequence[ScoredParagraph]
            The selected paragraphs, best first

        Returns
        -------
        ControllerExtraction
            The controller and the scored candidates

        Raises
        ------
        NoController
            No candidate qualifies

        """
        raise NotImplementedError


class RuleBasedEntityExtractor(EntityExtractor):
    """Score capitalized candidates with trigger, alias and designator rules.

    A candidate qualifies when it is immediately preceded by a trigger phrase (+3), followed by a parenthesized alias
    list containing "we" or "us" (+3), or ends with a legal designator (+2).  Qualifying candidates then get a bonus
    for the rank of their paragraph; the best total wins, ties going to the earliest candidate in the best-ranked
    paragraph.

    Parameters
    ----------
    rules : EntityRules, None
        The extractor rules; defaults to the bundled ones

    """

    def __init__(self, rules=None):
        self.rules = rules or default_entity_rules()

    def score_paragraph(self, paragraph, rank, index, bonus):
        """Score every candidate in one paragraph."""
        candidates = []
        for text, start, end in generate_candidates(paragraph, self.rules):
            if _excluded(text, self.rules):
                continue

            trigger = _preceding_trigger(paragraph, start, self.rules)
            alias = _has_self_alias(paragraph, end)
            designator = _is_designator(REGEX_TOKEN.findall(text)[-1], self.rules)
            evidence = (
                (constants.SCORE_TRIGGER if trigger else 0)
                + (constants.SCORE_ALIAS if alias else 0)
                + (constants.SCORE_DESIGNATOR if designator else 0)
            )
            score = evidence + bonus if evidence else 0
            candidates.append(Candidate(text, rank, index, start, end, trigger, alias, designator, evidence, score))
        return candidates

    def extract_controller(self, paragraphs):
        if not paragraphs:
            raise NoController("There are no paragraphs to search")

        candidates = []
        for rank, paragraph in enumerate(paragraphs):
            candidates.extend(self.score_paragraph(paragraph.text, rank, paragraph.index, len(paragraphs) - rank))

        qualifying = [candidate for candidate in candidates if candidate.evidence > 0]
        if not qualifying:
            raise NoController("No organization candidate qualifies as the data controller")

        winner = min(qualifying, key=lambda c: (-c.score, c.paragraph_rank, c.start))
        _LOGGER.debug("Controller '%s' won with score %d of %d candidates", winner.text, winner.score, len(candidates))
        return ControllerExtraction(winner.text, tuple(candidates), winner.paragraph_index)


def _split_connectors(text):
    """Split a candidate at "and" / "&" into its parts."""
    return [part for part in re.split(r"\s+(?:and|&)\s+", text) if part]


def _is_organization(text, rules):
    """Whether a candidate ends with a designator or names a known organization."""
    if _excluded(text, rules):
        return False
    if _is_designator(REGEX_TOKEN.findall(text)[-1], rules):
        return True
    normalized = normalize_org(text, rules.designators)
    return normalized.text in rules.known_orgs or normalized.tokens[0] in rules.known_orgs


def disclosed_entities(policy, rules=None):
    """Find every organization named in a policy.

    A run such as "Google and Amazon" counts as two organizations when each part is one on its own.

    Parameters
    ----------
    policy : PolicyText
        The policy
    rules : EntityRules, None
        The extractor rules; defaults to the bundled ones

    Returns
    -------
    set[str]
        The normalized organization names

    """
    rules = rules or default_entity_rules()
    found = set()
    for paragraph in policy.paragraphs:
        for text, _, _ in generate_candidates(paragraph, rules):
            parts = _split_connectors(text)
            if len(parts) < 2 or not all(_is_organization(part, rules) for part in parts):
                parts = [text]
            for part in parts:
                if _is_organization(part, rules):
                    found.add(normalize_org(part, rules.designators).text)
    return found
