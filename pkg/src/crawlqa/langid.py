"""Page-level language identification for the Fasttext_language wire field.

Two identifier implementations sit behind one interface: a deterministic
built-in scorer over fixed stopword profiles (used offline and in tests),
and an adapter for an external fasttext model file.  The external path
falls back to the built-in with a warning when the model cannot be loaded,
so pipelines never hard-fail on a missing model.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace

from .records import strip_markup

__all__ = [
    "LanguagePrediction",
    "StopwordIdentifier",
    "FasttextIdentifier",
    "get_identifier",
    "annotate",
    "DEFAULT_THRESHOLD",
]

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5

_TOKEN_RE = re.compile(r"[^\W\d_]+")
_CODE_RE = re.compile(r"[a-z]{2}\Z")


@dataclass(frozen=True)
class LanguagePrediction:
    code: str  # two-letter lowercase code
    confidence: float  # in [0, 1]


# Function-word profiles for the built-in scorer.  Kept small and mostly
# disjoint; a token shared by two languages counts toward both.
_PROFILES = {
    "en": frozenset("""
        the a an is are was were be been being am to of and or in on at for
        with by from as that this these those it its you your yours i my we
        our they their he she his her him them me us do does did done can
        could will would should shall may might must have has had having not
        no yes what how when where which who whose why whom if then than
        there here all any some more most other another into about but so up
        out over under again also just only very too own same such each few
        both between through during before after while because until without
        within against
        """.split()),
    "de": frozenset("""
        der die das den dem des ein eine einen einem einer und oder aber ist
        sind war waren sein bin bist seid werden wird wurde nicht kein keine
        ich du er sie es wir ihr mich dich sich uns euch mein dein ihre ihren
        zu zum zur mit auf für von vom im am beim aus bei nach über unter
        zwischen durch gegen ohne um als wie wo wer wann warum weshalb ob
        wenn dann denn doch noch schon auch nur sehr mehr alle alles etwas
        nichts man kann können muss müssen soll sollen will wollen hat haben
        hatte hätte dass weil
        """.split()),
    "fr": frozenset("""
        le la les un une des du de et ou est sont était été être suis es
        sommes êtes ne pas plus je tu il elle on nous vous ils elles me te se
        moi toi lui leur mon ma mes ton ta tes son sa ses notre votre nos vos
        ce cette ces cet que qui quoi dont où quand comment pourquoi si oui
        non avec pour sur dans par chez vers sous entre sans contre au aux
        mais donc or ni car très bien aussi tout tous toute toutes rien
        quelque chose ça cela ceci ai as avons avez ont avait fait faire peut
        pouvez veux voulez dois devez
        """.split()),
    "es": frozenset("""
        el la los las un una unos unas de del y o es son era eran ser estar
        soy eres somos sois está están no sí yo tú él ella usted nosotros
        vosotros ellos ellas me te se nos os mi mis tu tus su sus nuestro
        vuestro este esta estos estas ese esa esos esas que quien quién qué
        cómo cuándo dónde por qué si con para por sobre en entre sin contra
        al hacia desde hasta pero sino aunque muy más menos todo todos toda
        todas algo nada alguien nadie hay había tiene tienen tenía puede
        pueden quiero quieres hace hacer
        """.split()),
}


@dataclass(frozen=True)
class StopwordIdentifier:
    """Deterministic identifier: share of stopword hits per language.

    ``confidence`` is the winning language's share of all stopword hits, so
    a text dominated by one language's function words scores near 1.0.
    Abstains (returns None) on empty text, on text with no stopword hit at
    all, and below the confidence threshold.
    """

    threshold: float = DEFAULT_THRESHOLD

    def identify(self, text):
        if not text:
            return None
        tokens = _TOKEN_RE.findall(text.lower())
        if not tokens:
            return None
        hits = {}
        for code, profile in _PROFILES.items():
            count = sum(1 for token in tokens if token in profile)
            if count:
                hits[code] = count
        if not hits:
            return None
        total = sum(hits.values())
        best = min(hits, key=lambda code: (-hits[code], code))
        confidence = hits[best] / total
        if confidence < self.threshold:
            return None
        return LanguagePrediction(code=best, confidence=confidence)


class FasttextIdentifier:
    """Adapter for an external fasttext model file.

    Loading is attempted once, lazily; on failure the built-in identifier
    takes over for the lifetime of this object.
    """

    def __init__(self, model_path, threshold=DEFAULT_THRESHOLD):
        self.model_path = str(model_path)
        self.threshold = threshold
        self._model = None
        self._fallback = None

    def _load(self):
        if self._model is not None or self._fallback is not None:
            return
        try:
            import fasttext  # type: ignore[import-not-found]

            self._model = fasttext.load_model(self.model_path)
        except Exception as exc:  # model missing, package missing, bad file
            logger.warning(
                "language model %s unavailable (%s); falling back to built-in identifier",
                self.model_path, exc,
            )
            self._fallback = StopwordIdentifier(threshold=self.threshold)

    def identify(self, text):
        if not text:
            return None
        self._load()
        if self._fallback is not None:
            return self._fallback.identify(text)
        labels, scores = self._model.predict(text.replace("\n", " "))
        if not labels:
            return None
        code = labels[0].removeprefix("__label__").lower()
        confidence = min(1.0, float(scores[0]))
        if not _CODE_RE.match(code) or confidence < self.threshold:
            return None
        return LanguagePrediction(code=code, confidence=confidence)


def get_identifier(model_path=None, threshold=DEFAULT_THRESHOLD):
    if model_path:
        return FasttextIdentifier(model_path, threshold=threshold)
    return StopwordIdentifier(threshold=threshold)


def record_text(record):
    """The text span fed to the identifier: all stripped question and
    answer text of the page, concatenated."""
    parts = []
    for question in record.questions:
        if question.name_markup:
            parts.append(strip_markup(question.name_markup))
        if question.text_markup:
            parts.append(strip_markup(question.text_markup))
        for answer in question.answers:
            parts.append(strip_markup(answer.text_markup))
    return " ".join(part for part in parts if part)


def annotate(record, identifier=None):
    """Return a copy with detected_language set, or the record unchanged
    when identification abstains."""
    if identifier is None:
        identifier = StopwordIdentifier()
    prediction = identifier.identify(record_text(record))
    if prediction is None:
        return record
    return replace(record, detected_language=prediction.code)
