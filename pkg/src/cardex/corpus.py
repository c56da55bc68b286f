"""Documents, tokenization, lemmatization and KB/gold loading."""

from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError

NUM_TAGS = ("NONE", "DATE", "TIME", "DURATION", "SET", "MONEY", "PERCENT", "NUMBER", "ORDINAL")


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    index: int
    char_start: int
    char_end: int
    num_tag: str = "NONE"
    num_value: int | None = None


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[Token, ...]

    def __len__(self):
        return len(self.tokens)

    @property
    def lemmas(self):
        return [t.lemma for t in self.tokens]


@dataclass(frozen=True)
class Document:
    subject_id: str
    predicate_id: str
    sentences: tuple[Sentence, ...]

    @property
    def key(self):
        return (self.subject_id, self.predicate_id)


@dataclass
class KBStore:
    """Triple counts per (subject, predicate), plus optional manual counts."""

    counts: dict[tuple[str, str], int] = field(default_factory=dict)
    gold_counts: dict[tuple[str, str], int] | None = None

    def count(self, subject, predicate):
        return self.counts.get((subject, predicate))


# ---------------------------------------------------------------------------
# tokenization

_TOKEN_RE = re.compile(
    r"""
    \d+(?:[.,:]\d+)*(?:st|nd|rd|th)?(?!\w)         # 1,000  3.5  10:30  4th
    | \d\w*                                       # 1990s, 3D
    | '(?:s|t|re|ve|ll|d|m)(?![^\W\d_])          # clitics
    | [^\W\d_]+(?:-[^\W\d_]+)*                    # words, twenty-one
    | \S                                          # any other single char
    """,
    re.VERBOSE | re.IGNORECASE,
)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens with character offsets.

    Digit groups keep internal commas, periods and colons; hyphenated words
    stay whole. Lemmas are filled in, numeric tags are not.
    """
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        surface = m.group()
        tokens.append(Token(surface, lemmatize(surface), len(tokens), m.start(), m.end()))
    return tokens


# ---------------------------------------------------------------------------
# lemmatization

_LEMMA_EXCEPTIONS = {
    "children": "child", "wives": "wife", "husbands": "husband", "men": "man",
    "women": "woman", "people": "person", "feet": "foot", "teeth": "tooth",
    "mice": "mouse", "geese": "goose", "lives": "life", "knives": "knife",
    "leaves": "leaf", "halves": "half", "selves": "self", "thieves": "thief",
    "has": "have", "had": "have", "having": "have",
    "is": "be", "are": "be", "was": "be", "were": "be", "been": "be", "being": "be", "am": "be",
    "does": "do", "did": "do", "done": "do", "doing": "do",
    "went": "go", "gone": "go", "goes": "go",
    "gave": "give", "given": "give", "won": "win", "wrote": "write", "written": "write",
    "bore": "bear", "born": "bear", "borne": "bear", "became": "become",
    "made": "make", "took": "take", "taken": "take", "got": "get", "left": "leave",
    "held": "hold", "led": "lead", "met": "meet", "saw": "see", "seen": "see",
    "ran": "run", "began": "begin", "begun": "begin", "fell": "fall", "grew": "grow",
    "grown": "grow", "knew": "know", "known": "know", "built": "build", "found": "find",
    "lost": "lose", "sold": "sell", "told": "tell", "said": "say", "paid": "pay",
    "spent": "spend", "sent": "send", "brought": "bring", "bought": "buy",
    "fought": "fight", "taught": "teach", "thought": "think", "kept": "keep",
    "died": "die", "dies": "die", "lied": "lie",
    "series": "series", "species": "species", "news": "news", "sons": "son",
    "his": "his", "its": "its", "this": "this", "thus": "thus", "us": "us",
    "yes": "yes", "always": "always", "perhaps": "perhaps", "whereas": "whereas",
    "towns": "town", "times": "time", "games": "game", "goals": "goal",
    "twins": "twins", "triplets": "triplets", "quadruplets": "quadruplets",
}

_DOUBLED_KEEP = frozenset("lsz")


def lemmatize(token: str) -> str:
    """Lowercased lemma: exception lexicon, then suffix rules."""
    w = token.lower()
    if w in _LEMMA_EXCEPTIONS:
        return _LEMMA_EXCEPTIONS[w]
    if not w.isalpha() or len(w) <= 3:
        return w
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith("ied"):
        return w[:-3] + "y"
    if w.endswith(("sses", "shes", "ches", "xes", "zzes")):
        return w[:-2]
    if w.endswith("s") and not w.endswith(("ss", "us", "is", "ous")):
        return w[:-1]
    if w.endswith("ed") and len(w) > 4 and not w.endswith("eed"):
        stem = w[:-2]
        if len(stem) > 2 and stem[-1] == stem[-2] and stem[-1] not in _DOUBLED_KEEP:
            return stem[:-1]  # planned -> plan
        if stem.endswith(("at", "iz", "is", "v", "rc", "rg", "uc", "ur", "ag", "ot", "om", "am", "ac")):
            return stem + "e"  # divorced -> divorce, created -> create
        return stem
    return w


# ---------------------------------------------------------------------------
# sentence splitting

ABBREVIATIONS = frozenset({
    "mr", "mrs", "ms", "dr", "st", "no", "jr", "sr", "prof", "gen", "lt", "col",
    "sgt", "capt", "rev", "gov", "sen", "rep", "mt", "ft", "inc", "co", "corp",
    "ltd", "vs", "etc", "vol", "fig", "approx", "ca", "jan", "feb", "mar", "apr",
    "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "u.s", "u.k", "e.g", "i.e",
})

_BOUNDARY_RE = re.compile(r"[.!?][\"')\]]*\s+(?=[A-Z0-9])")
_LAST_WORD_RE = re.compile(r"([\w.]+)\.$")


def split_sentences(text: str) -> list[str]:
    sentences = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        head = text[start:m.start() + 1]
        if head.endswith("."):
            w = _LAST_WORD_RE.search(head)
            if w and (w.group(1).lower() in ABBREVIATIONS or re.fullmatch(r"[A-Z]", w.group(1))):
                continue
        end = m.end() - len(m.group()) + len(m.group().rstrip())
        sentences.append(text[start:end].strip())
        start = m.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return [s for s in sentences if s]


def make_sentence(text: str) -> Sentence:
    return Sentence(text, tuple(tokenize(text)))


def make_document(subject: str, predicate: str, text: str, rules=None, tag=True) -> Document:
    """Split, tokenize and (by default) number-tag a raw text."""
    if not subject:
        raise DataError("document subject must be non-empty")
    sentences = tuple(make_sentence(s) for s in split_sentences(text))
    doc = Document(subject, predicate, sentences)
    if tag:
        from .numtag import classify_document
        doc = classify_document(doc, rules)
    return doc


def document_to_json(doc: Document) -> str:
    text = " ".join(s.text for s in doc.sentences)
    return json.dumps({"subject": doc.subject_id, "predicate": doc.predicate_id, "text": text},
                      ensure_ascii=False)


# ---------------------------------------------------------------------------
# loaders

def load_corpus(path, rules=None, tag=True) -> list[Document]:
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                subject, predicate, text = rec["subject"], rec["predicate"], rec["text"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed corpus record ({exc})") from None
            if not all(isinstance(v, str) for v in (subject, predicate, text)) or not subject:
                raise DataError(f"{path}:{lineno}: subject, predicate and text must be strings")
            if (subject, predicate) in seen:
                raise DataError(f"{path}:{lineno}: duplicate document for ({subject}, {predicate})")
            seen.add((subject, predicate))
            docs.append(make_document(subject, predicate, text, rules, tag))
    return docs


def _tsv_rows(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not all(p.strip() for p in parts):
                raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields")
            yield lineno, [p.strip() for p in parts]


def load_kb(path) -> KBStore:
    objects = defaultdict(set)
    for _, (s, p, o) in _tsv_rows(path):
        objects[(s, p)].add(o)
    return KBStore({k: len(v) for k, v in objects.items()})


def load_gold(path) -> dict[tuple[str, str], int]:
    gold = {}
    for lineno, (s, p, c) in _tsv_rows(path):
        if not re.fullmatch(r"\d+", c):
            raise DataError(f"{path}:{lineno}: count must be a non-negative integer, got {c!r}")
        gold[(s, p)] = int(c)
    return gold


def write_corpus(docs, path):
    Path(path).write_text("".join(document_to_json(d) + "\n" for d in docs), encoding="utf-8")
