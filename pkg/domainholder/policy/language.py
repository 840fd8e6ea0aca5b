"""Character-trigram language identification.

Each bundled language has a sample text in ``data/languages/<tag>.txt``; its trigram counts form the language profile.
A text is assigned the language whose profile is most similar (cosine) to its own trigram counts.

"""


from dataclasses import dataclass
import functools
import logging
import os

from sklearn.feature_extraction.text import CountVectorizer
from sklearn.metrics.pairwise import cosine_similarity

from .. import constants
from ..exceptions import Indeterminate, TooShort

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class LanguageGuess(object):
    """The detected language and the similarity of its profile, in [0, 1]."""

    language: str
    confidence: float


class LanguageDetector(object):
    """Identify the language of a text from bundled trigram profiles.

    Parameters
    ----------
    profile_dir : str
        A directory of ``<language tag>.txt`` sample texts
    margin : float
        The minimum similarity gap between the two best languages

    """

    def __init__(self, profile_dir=constants.LANGUAGE_PROFILE_DIR, margin=constants.DEFAULT_LANGUAGE_MARGIN):
        self.margin = margin

        samples = {}
        for filename in sorted(os.listdir(profile_dir)):
            tag, extension = os.path.splitext(filename)
            if extension == ".txt":
                with open(os.path.join(profile_dir, filename), encoding="utf-8") as f:
                    samples[tag] = f.read()

        if len(samples) < 2:
            raise ValueError("At least two language profiles are required in '{}'".format(profile_dir))

        self.languages = tuple(samples)
        self._vectorizer = CountVectorizer(analyzer="char_wb", ngram_range=(3, 3), lowercase=False)
        self._profiles = self._vectorizer.fit_transform(text.casefold() for text in samples.values())
        _LOGGER.debug("Loaded %d language profiles from %s", len(self.languages), profile_dir)

    def similarities(self, text):
        """The similarity of ``text`` to each language profile.

        Returns
        -------
        dict
            Language tag -> cosine similarity

        """
        counts = self._vectorizer.transform([text.casefold()])
        return dict(zip(self.languages, cosine_similarity(counts, self._profiles)[0].tolist()))

    def detect_language(self, text):
        """Identify the language of ``text``.

        Parameters
        ----------
        text : str
            At least 50 characters of text

        Returns
        -------
        LanguageGuess
            The best-matching language

        Raises
        ------
        TooShort
            The text has fewer than 50 characters
        Indeterminate
            The two best languages are closer than ``margin``

        """
        text = " ".join((text or "").split())
        if len(text) < constants.MIN_LANGUAGE_CHARS:
            raise TooShort("{} characters are too few to identify a language".format(len(text)))

        ranked = sorted(self.similarities(text).items(), key=lambda item: (-item[1], item[0]))
        (best, best_score), (_, second_score) = ranked[0], ranked[1]
        if best_score - second_score < self.margin:
            raise Indeterminate(
                "Language is ambiguous: {} ({:.3f}) vs {} ({:.3f})".format(best, best_score, ranked[1][0], second_score)
            )

        return LanguageGuess(best, best_score)


@functools.lru_cache(maxsize=None)
def default_language_detector():
    """Build the detector for the bundled profiles once."""
    return LanguageDetector()
