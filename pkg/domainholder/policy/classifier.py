"""A linear privacy-policy classifier.

Texts are represented as L2-normalized tf-idf vectors over casefolded word tokens, and a linear separator is fit by
stochastic gradient descent on the modified-Huber loss with an L2 penalty.  The trained model keeps only its
vocabulary, idf weights, weight vector, bias and threshold, and is stored as JSON with floats written in hexadecimal so
that reloading it is bit-exact.

"""


from dataclasses import asdict, dataclass
from fractions import Fraction
import functools
import json
import logging
import os

import numpy as np
from sklearn.feature_extraction.text import CountVectorizer, TfidfVectorizer
from sklearn.linear_model import SGDClassifier
from sklearn.model_selection import train_test_split
from sklearn.preprocessing import normalize

from .. import constants
from ..exceptions import EmptyCorpus, EmptyText, FormatError, SingleClassCorpus

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassifierConfig(object):
    """Training settings."""

    loss: str = constants.DEFAULT_LOSS
    alpha: float = constants.DEFAULT_ALPHA
    epochs: int = constants.DEFAULT_EPOCHS
    seed: int = constants.DEFAULT_SEED
    token_pattern: str = constants.DEFAULT_TOKEN_PATTERN
    max_vocabulary: int = constants.DEFAULT_MAX_VOCABULARY
    threshold: float = constants.DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("`alpha` must be positive")
        if self.epochs < 1:
            raise ValueError("`epochs` must be at least 1")
        if self.max_vocabulary < 1:
            raise ValueError("`max_vocabulary` must be at least 1")


@dataclass(frozen=True)
class Classification(object):
    """A classifier verdict: ``is_policy`` is ``score > threshold``."""

    is_policy: bool
    score: float


@dataclass(frozen=True)
class LabeledText(object):
    """A training document."""

    text: str
    label: str
    path: str = None


def _casefold(text):
    return text.casefold()


class PolicyClassifier(object):
    """A trained linear classifier.

    Parameters
    ----------
    vocabulary : Sequence[str]
        The feature tokens, in feature order
    idf : numpy.ndarray
        The idf weight of each token
    weights : numpy.ndarray
        The weight of each token
    bias : float
        The intercept
    config : ClassifierConfig
        The settings the model was trained with; ``config.threshold`` is the decision threshold

    """

    def __init__(self, vocabulary, idf, weights, bias, config=None):
        self.vocabulary = tuple(vocabulary)
        self.idf = np.asarray(idf, dtype=np.float64)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)
        self.config = config or ClassifierConfig()

        if not len(self.vocabulary) == len(self.idf) == len(self.weights):
            raise ValueError("The vocabulary, idf and weights must have the same length")

        self._counter = CountVectorizer(
            vocabulary={token: index for index, token in enumerate(self.vocabulary)},
            token_pattern=self.config.token_pattern,
            preprocessor=_casefold,
        )

    @property
    def threshold(self):
        """The decision threshold."""
        return self.config.threshold

    def features(self, text):
        """The L2-normalized tf-idf vector of ``text`` (a 1-row sparse matrix)."""
        counts = self._counter.transform([text]).astype(np.float64)
        return normalize(counts.multiply(self.idf).tocsr(), norm="l2")

    def decision_function(self, text):
        """The signed distance ``w·x + b``; out-of-vocabulary tokens are ignored."""
        return float(self.features(text).dot(self.weights)[0] + self.bias)

    def classify_policy(self, text):
        """Decide whether ``text`` is a privacy policy.

        Parameters
        ----------
        text : str
            The document text

        Returns
        -------
        Classification
            The verdict and its score

        Raises
        ------
        EmptyText
            ``text`` is empty or blank

        """
        if not text or not text.strip():
            raise EmptyText("There is no text to classify")

        score = self.decision_function(text)
        return Classification(score > self.threshold, score)

    # ======================================================================= #
    #                                                                         #
    #                              Serialization                              #
    #                                                                         #
    # ======================================================================= #
    def to_dict(self):
        """The model as a JSON-compatible dictionary."""
        return {
            "format": constants.MODEL_FORMAT,
            "version": constants.MODEL_VERSION,
            "config": {
                key: float.hex(value) if isinstance(value, float) else value
                for key, value in asdict(self.config).items()
            },
            "vocabulary": list(self.vocabulary),
            "idf": [float.hex(float(value)) for value in self.idf],
            "weights": [float.hex(float(value)) for value in self.weights],
            "bias": float.hex(self.bias),
        }

    @classmethod
    def from_dict(cls, data):
        """Rebuild a model from :py:meth:`to_dict` output.

        Raises
        ------
        FormatError
            The data is not a model of a supported version

        """
        if data.get("format") != constants.MODEL_FORMAT or data.get("version") != constants.MODEL_VERSION:
            raise FormatError("Not a version {} {} model".format(constants.MODEL_VERSION, constants.MODEL_FORMAT))

        try:
            config = ClassifierConfig(
                **{
                    key: float.fromhex(value) if isinstance(value, str) and key in ("alpha", "threshold") else value
                    for key, value in data["config"].items()
                }
            )
            return cls(
                data["vocabulary"],
                [float.fromhex(value) for value in data["idf"]],
                [float.fromhex(value) for value in data["weights"]],
                float.fromhex(data["bias"]),
                config,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError("Malformed model: {}".format(exc)) from exc

    def save(self, path):
        """Write the model to ``path``."""
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=1, sort_keys=True)
        _LOGGER.info("Saved a %d-token classifier to %s", len(self.vocabulary), path)

    @classmethod
    def load(cls, path):
        """Read a model written by :py:meth:`save`."""
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except ValueError as exc:
            raise FormatError("Model file is not valid JSON", path) from exc
        return cls.from_dict(data)


def train_classifier(corpus, config=None):
    """Train a policy classifier.

    Training is single-threaded and the shuffle order is fixed by ``config.seed``, so the same corpus and config always
    produce the same model.

    Parameters
    ----------
    corpus : Sequence[LabeledText]
        Documents labeled ``policy`` or ``other``
    config : ClassifierConfig, None
        Training settings; defaults to :py:class:`ClassifierConfig` ``()``

    Returns
    -------
    PolicyClassifier
        The trained model

    Raises
    ------
    EmptyCorpus
        There are no documents
    SingleClassCorpus
        All documents have the same label

    """
    config = config or ClassifierConfig()
    if not corpus:
        raise EmptyCorpus("The training corpus is empty")

    labels = np.array([1 if doc.label == constants.LABEL_POLICY else 0 for doc in corpus])
    if len(set(labels.tolist())) < 2:
        raise SingleClassCorpus("The training corpus has only one class")

    vectorizer = TfidfVectorizer(
        preprocessor=_casefold,
        token_pattern=config.token_pattern,
        max_features=config.max_vocabulary,
        norm="l2",
    )
    features = vectorizer.fit_transform([doc.text for doc in corpus])

    model = SGDClassifier(
        loss=config.loss,
        penalty="l2",
        alpha=config.alpha,
        max_iter=config.epochs,
        tol=None,
        shuffle=True,
        random_state=config.seed,
    )
    model.fit(features, labels)

    vocabulary = sorted(vectorizer.vocabulary_, key=vectorizer.vocabulary_.get)
    _LOGGER.info("Trained a %d-token classifier on %d documents", len(vocabulary), len(corpus))
    return PolicyClassifier(vocabulary, vectorizer.idf_, model.coef_[0], model.intercept_[0], config)


def accuracy(model, corpus):
    """The fraction of ``corpus`` that ``model`` labels correctly, as a :py:class:`~fractions.Fraction`."""
    if not corpus:
        raise EmptyCorpus("Can't measure accuracy on an empty corpus")
    correct = sum(
        model.classify_policy(doc.text).is_policy == (doc.label == constants.LABEL_POLICY) for doc in corpus
    )
    return Fraction(correct, len(corpus))


# ======================================================================= #
#                                                                         #
#                                  Corpus                                 #
#                                                                         #
# ======================================================================= #
def load_corpus(directory=constants.CORPUS_DIR):
    """Load a labeled corpus.

    The directory holds a ``labels.tsv`` manifest with one ``path<TAB>label`` line per document, paths relative to the
    directory.

    Parameters
    ----------
    directory : str
        The corpus directory

    Returns
    -------
    list[LabeledText]
        The documents in manifest order

    Raises
    ------
    FormatError
        A manifest line is malformed or names a missing file

    """
    manifest = os.path.join(directory, constants.CORPUS_LABELS_FILE)
    corpus = []
    with open(manifest, encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2 or fields[1] not in (constants.LABEL_POLICY, constants.LABEL_OTHER):
                raise FormatError("expected 'path<TAB>policy|other'", manifest, line_number)
            try:
                with open(os.path.join(directory, fields[0]), encoding="utf-8", errors="replace") as doc:
                    corpus.append(LabeledText(doc.read(), fields[1], fields[0]))
            except OSError as exc:
                raise FormatError("can't read '{}'".format(fields[0]), manifest, line_number) from exc

    return corpus


def split_corpus(corpus, holdout_size=constants.DEFAULT_HOLDOUT_SIZE, seed=constants.DEFAULT_SEED):
    """Split a corpus into a training set and a stratified held-out set of ``holdout_size`` documents.

    Returns
    -------
    tuple
        ``(train, holdout)``

    """
    train, holdout = train_test_split(
        list(corpus), test_size=holdout_size, random_state=seed, stratify=[doc.label for doc in corpus]
    )
    return train, holdout


@functools.lru_cache(maxsize=None)
def default_classifier():
    """Train the classifier on the bundled corpus once."""
    return train_classifier(load_corpus(constants.CORPUS_DIR))
