"""Numeric expression tagging, number-word parsing and the nummod heuristic.

Every numeric token is assigned exactly one of DATE, TIME, DURATION, SET,
MONEY, PERCENT, ORDINAL or NUMBER by a fixed first-match rule order. Only
NUMBER tokens with an integer value are extraction candidates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources

from .corpus import Document, Sentence, Token
from .errors import DataError

_DIGIT_RE = re.compile(r"^\d+(?:[.,:]\d+)*(?:st|nd|rd|th)?$", re.IGNORECASE)
_ORDINAL_DIGIT_RE = re.compile(r"^(\d+)(?:st|nd|rd|th)$", re.IGNORECASE)
_CLOCK_RE = re.compile(r"^\d{1,2}:\d{2}$")
_YEAR_RE = re.compile(r"^\d{4}$")
_DECADE_RE = re.compile(r"^\d{3}0s$")
_GROUPED_RE = re.compile(r"^\d{1,3}(?:,\d{3})+$")

_LEXICON_SECTIONS = ("number_words", "scale_words", "ordinal_words", "count_words")
_SET_SECTIONS = (
    "month_names", "currency_markers", "percent_markers", "temporal_units", "set_markers",
    "function_words", "verbs", "adjectives", "zero_words", "indefinite_verbs",
)


@dataclass(frozen=True, eq=False)
class NumTagRuleSet:
    number_words: dict
    scale_words: dict
    ordinal_words: dict
    count_words: dict
    month_names: frozenset
    currency_markers: frozenset
    percent_markers: frozenset
    temporal_units: frozenset
    set_markers: frozenset
    function_words: frozenset
    verbs: frozenset
    adjectives: frozenset
    zero_words: frozenset
    indefinite_verbs: frozenset
    year_range: tuple = (1000, 2199)

    def __post_init__(self):
        if not (self.number_words and self.ordinal_words and self.month_names):
            raise DataError("number, ordinal and month lexicons must be non-empty")
        lo, hi = self.year_range
        if lo > hi:
            raise DataError(f"year_range bounds out of order: {self.year_range}")


def parse_rules(text: str, source="<rules>") -> NumTagRuleSet:
    """Parse the sectioned plain-text lexicon format (see data/numtag_rules.txt)."""
    sections: dict[str, list[list[str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1].strip(), [])
            continue
        if current is None:
            raise DataError(f"{source}:{lineno}: entry outside of a [section]")
        current.append(line.split("\t"))
    fields = {}
    for name in _LEXICON_SECTIONS:
        lex = {}
        for entry in sections.get(name, []):
            if len(entry) != 2 or not entry[1].strip().isdigit():
                raise DataError(f"{source}: [{name}] entries must be word<TAB>value, got {entry!r}")
            lex[entry[0].strip().lower()] = int(entry[1])
        fields[name] = lex
    for name in _SET_SECTIONS:
        fields[name] = frozenset(e[0].strip().lower() for e in sections.get(name, []))
    if "year_range" in sections:
        lo, hi = sections["year_range"][0]
        fields["year_range"] = (int(lo), int(hi))
    return NumTagRuleSet(**fields)


@lru_cache(maxsize=None)
def default_rules() -> NumTagRuleSet:
    text = resources.files("cardex").joinpath("data/numtag_rules.txt").read_text(encoding="utf-8")
    return parse_rules(text, "numtag_rules.txt")


def load_rules(path) -> NumTagRuleSet:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read(), str(path))


# ---------------------------------------------------------------------------
# number words

def _compose(parts, rules):
    total = current = 0
    seen = False
    for p in parts:
        if p == "and" and seen:
            continue
        if p in rules.number_words:
            current += rules.number_words[p]
        elif p in rules.scale_words:
            scale = rules.scale_words[p]
            if scale == 100:
                current = max(current, 1) * 100
            else:
                total += max(current, 1) * scale
                current = 0
        else:
            return None
        seen = True
    return total + current if seen else None


def parse_number_word(surface: str, rules: NumTagRuleSet | None = None) -> int | None:
    """Integer value of a digit string, number word or count word, else None.

    >>> parse_number_word("twenty-one")
    21
    >>> parse_number_word("1,000")
    1000
    """
    rules = rules or default_rules()
    s = surface.strip().lower()
    if not s:
        return None
    if s[0].isdigit():
        if s.isdigit():
            return int(s)
        if _GROUPED_RE.match(s):
            return int(s.replace(",", ""))
        m = _ORDINAL_DIGIT_RE.match(s)
        return int(m.group(1)) if m else None
    if s in rules.count_words:
        return rules.count_words[s]
    parts = [p for p in re.split(r"[-\s]+", s) if p]
    if parts and parts[-1] in rules.ordinal_words:
        head = _compose(parts[:-1], rules) if len(parts) > 1 else 0
        if head is None:
            return None
        last = rules.ordinal_words[parts[-1]]
        if last == 100:
            return max(head, 1) * 100
        return head + last
    return _compose(parts, rules)


def _is_ordinal_surface(s: str, rules) -> bool:
    if _ORDINAL_DIGIT_RE.match(s):
        return True
    parts = [p for p in re.split(r"[-\s]+", s.lower()) if p]
    return bool(parts) and parts[-1] in rules.ordinal_words and parse_number_word(s, rules) is not None


def is_numeric_surface(surface: str, rules: NumTagRuleSet | None = None) -> bool:
    rules = rules or default_rules()
    if surface[:1].isdigit():
        return bool(_DIGIT_RE.match(surface) or _DECADE_RE.match(surface))
    return parse_number_word(surface, rules) is not None


# ---------------------------------------------------------------------------
# tagging

def _tag_token(i, surfaces, lemmas, numeric, rules):
    n = len(surfaces)
    s = surfaces[i]
    low = s.lower()

    def lemma(j):
        return lemmas[j] if 0 <= j < n else None

    # PERCENT
    if lemma(i + 1) in rules.percent_markers or (lemma(i + 1) == "per" and lemma(i + 2) == "cent"):
        return "PERCENT"
    # MONEY: marker before (skipping other number tokens) or after (skipping scale words)
    j = i - 1
    while j >= 0 and numeric[j]:
        j -= 1
    k = i + 1
    while k < n and surfaces[k].lower() in rules.scale_words:
        k += 1
    if lemma(j) in rules.currency_markers or lemma(k) in rules.currency_markers:
        return "MONEY"
    # DATE
    if _YEAR_RE.match(s) and rules.year_range[0] <= int(s) <= rules.year_range[1]:
        return "DATE"
    if _DECADE_RE.match(s):
        return "DATE"
    for j in (i - 1, i + 1):
        if 0 <= j < n and surfaces[j][:1].isupper() and lemma(j) in rules.month_names:
            return "DATE"
    # TIME
    if _CLOCK_RE.match(s) or (i + 1 < n and surfaces[i + 1].lower() in ("am", "pm")):
        return "TIME"
    # DURATION / SET
    unit_at = None
    if lemma(i + 1) in rules.temporal_units:
        unit_at = i + 1
    elif lemma(i + 2) in rules.temporal_units and _may_intervene(i + 1, surfaces, lemmas, rules):
        unit_at = i + 2
    if unit_at is not None:
        if lemma(i - 1) in rules.set_markers or lemma(unit_at + 1) in rules.set_markers:
            return "SET"
        return "DURATION"
    # ORDINAL
    if _is_ordinal_surface(low, rules):
        return "ORDINAL"
    return "NUMBER"


def _may_intervene(j, surfaces, lemmas, rules):
    s = surfaces[j]
    if s == "-":
        return True
    return s.isalpha() and (lemmas[j] not in rules.function_words or lemmas[j] == "more")


def classify_numbers(sentence: Sentence, rules: NumTagRuleSet | None = None) -> Sentence:
    """Return a copy of ``sentence`` with num_tag/num_value filled in."""
    rules = rules or default_rules()
    surfaces = [t.surface for t in sentence.tokens]
    lemmas = [t.lemma for t in sentence.tokens]
    numeric = [is_numeric_surface(s, rules) for s in surfaces]
    tokens = []
    for i, tok in enumerate(sentence.tokens):
        if not numeric[i]:
            tokens.append(replace(tok, num_tag="NONE", num_value=None))
            continue
        tag = _tag_token(i, surfaces, lemmas, numeric, rules)
        value = parse_number_word(tok.surface, rules) if tag in ("NUMBER", "ORDINAL") else None
        tokens.append(replace(tok, num_tag=tag, num_value=value))
    return Sentence(sentence.text, tuple(tokens))


def classify_document(doc: Document, rules: NumTagRuleSet | None = None) -> Document:
    rules = rules or default_rules()
    return Document(doc.subject_id, doc.predicate_id,
                    tuple(classify_numbers(s, rules) for s in doc.sentences))


def is_candidate(token: Token) -> bool:
    return token.num_tag == "NUMBER" and token.num_value is not None


# ---------------------------------------------------------------------------
# lexical heuristics standing in for a dependency parse

def is_adjective_like(token: Token, rules: NumTagRuleSet | None = None) -> bool:
    rules = rules or default_rules()
    if token.num_tag != "NONE":
        return False
    low = token.surface.lower()
    return token.lemma in rules.adjectives or (len(low) > 4 and low.endswith("ed") and low.isalpha())


def is_noun_like(token: Token, rules: NumTagRuleSet | None = None) -> bool:
    rules = rules or default_rules()
    if token.num_tag != "NONE":
        return False
    word = token.surface.replace("-", "")
    if not word.isalpha():
        return False
    lem = token.lemma
    if lem in rules.function_words or lem in rules.verbs or lem.endswith("ly"):
        return False
    return not is_adjective_like(token, rules)


def _noun_follows(tokens, j, rules, allow_scale=False):
    """Noun at j, or one adjective (or scale word) at j and a noun at j+1."""
    if j >= len(tokens):
        return False
    if is_noun_like(tokens[j], rules):
        return True
    mid = tokens[j]
    bridging = is_adjective_like(mid, rules) or (
        allow_scale and mid.surface.lower() in rules.scale_words)
    return bridging and j + 1 < len(tokens) and is_noun_like(tokens[j + 1], rules)


def is_nummod(sentence: Sentence, index: int, rules: NumTagRuleSet | None = None) -> bool:
    """Approximate "number modifies a noun": a noun within the next two tokens.

    Blocks partitive uses like "one of the reasons".
    """
    if not 0 <= index < len(sentence.tokens):
        raise IndexError(f"token index {index} out of range for sentence of length {len(sentence.tokens)}")
    rules = rules or default_rules()
    toks = sentence.tokens
    if not is_candidate(toks[index]):
        return False
    if index + 1 < len(toks) and toks[index + 1].lemma == "of":
        return False
    return _noun_follows(toks, index + 1, rules, allow_scale=True)


_NEGATORS = ("not", "n't", "'t", "without")


def translate_zero_one(sentence: Sentence, rules: NumTagRuleSet | None = None) -> list[tuple[int, int]]:
    """Implicit counts expressed without digits, as (token position, value) pairs.

    Negation frames ("never married", "no children", "not have any
    children") give 0; "a/an NOUN" after a possession verb and "only NOUN"
    give 1. Tokens are not modified.
    """
    rules = rules or default_rules()
    toks = sentence.tokens
    n = len(toks)
    out = []
    for i, tok in enumerate(toks):
        lem = tok.lemma
        if lem in rules.zero_words:
            out.append((i, 0))
        elif lem == "never":
            if any(_is_verb_like(toks[j], rules) for j in range(i + 1, min(n, i + 4))):
                out.append((i, 0))
        elif lem == "no":
            if _noun_follows(toks, i + 1, rules):
                out.append((i, 0))
        elif lem in _NEGATORS:
            for j in range(i + 1, min(n, i + 4)):
                if toks[j].lemma == "any" and _noun_follows(toks, j + 1, rules):
                    out.append((i, 0))
                    break
        elif lem in ("a", "an"):
            governed = any(toks[j].lemma in rules.indefinite_verbs for j in range(max(0, i - 3), i))
            if governed and _noun_follows(toks, i + 1, rules):
                out.append((i, 1))
        elif lem == "only":
            if _noun_follows(toks, i + 1, rules):
                out.append((i, 1))
    return out


def _is_verb_like(token, rules):
    low = token.surface.lower()
    return token.lemma in rules.verbs or (low.isalpha() and len(low) > 4 and low.endswith("ed"))
