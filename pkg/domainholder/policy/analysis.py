"""The policy analysis pipeline: text, language, classification, paragraph selection, controller extraction.

"""


from dataclasses import dataclass
import logging

from .. import constants
from ..exceptions import Indeterminate, NotAPolicy, NotEnglish, TooShort
from .classifier import default_classifier
from .entities import RuleBasedEntityExtractor
from .language import default_language_detector
from .paragraphs import default_controller_lexicon, select_paragraphs
from .text import extract_text

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolicyAnalysis(object):
    """A successful analysis of one candidate page."""

    url: str
    controller: str
    paragraph_index: int
    extraction: object
    policy: object
    score: float


class PolicyAnalyzer(object):
    """Turn a fetched page into a data controller name.

    Parameters
    ----------
    classifier : PolicyClassifier, None
        The policy classifier; defaults to one trained on the bundled corpus
    language_detector : LanguageDetector, None
        The language detector; defaults to the bundled profiles
    controller_lexicon : ControllerLexicon, None
        The paragraph keywords; defaults to the bundled lexicon
    extractor : EntityExtractor, None
        The controller extractor; defaults to :py:class:`~domainholder.policy.entities.RuleBasedEntityExtractor`

    """

    def __init__(self, classifier=None, language_detector=None, controller_lexicon=None, extractor=None):
        self._classifier = classifier
        self.language_detector = language_detector or default_language_detector()
        self.controller_lexicon = controller_lexicon or default_controller_lexicon()
        self.extractor = extractor or RuleBasedEntityExtractor()

    @property
    def classifier(self):
        """The policy classifier, trained on first use if none was given."""
        if self._classifier is None:
            self._classifier = default_classifier()
        return self._classifier

    def analyze(self, html, url=None):
        """Run the pipeline on a page, stopping at the first failing stage.

        Parameters
        ----------
        html : bytes, str
            The candidate page
        url : str, None
            The page URL

        Returns
        -------
        PolicyAnalysis
            The extracted controller

        Raises
        ------
        PolicyStageError
            A stage failed; the ``stage`` attribute names it.  Texts that are not identified as English, including too
            short or ambiguous ones, raise :py:class:`~domainholder.exceptions.NotEnglish`.

        """
        policy = extract_text(html, url)

        try:
            guess = self.language_detector.detect_language(policy.full_text)
        except (TooShort, Indeterminate) as exc:
            raise NotEnglish(str(exc)) from exc
        if guess.language != constants.LANGUAGE_ENGLISH:
            raise NotEnglish("{} is written in '{}'".format(url or "The page", guess.language))

        verdict = self.classifier.classify_policy(policy.full_text)
        if not verdict.is_policy:
            raise NotAPolicy("{} is not a privacy policy (score {:.3f})".format(url or "The page", verdict.score))

        paragraphs = select_paragraphs(policy, self.controller_lexicon)
        extraction = self.extractor.extract_controller(paragraphs)

        _LOGGER.debug("Extracted controller '%s' from %s", extraction.controller, url)
        return PolicyAnalysis(url, extraction.controller, extraction.paragraph_index, extraction, policy, verdict.score)
