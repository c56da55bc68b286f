"""Seeded generators for toy biography corpora with known child counts.

Every document states its count once via a "children" phrase, surrounded
by distractor numbers (dates, percents, money, durations, other counts).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

WORDS = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
         "eleven", "twelve"]
FIRST = ["Anna", "Boris", "Carla", "David", "Elena", "Frank", "Greta", "Hugo", "Irene", "Jonas",
         "Karin", "Luca", "Maria", "Nils", "Olga", "Pavel", "Rosa", "Stefan", "Tina", "Viktor"]
LAST = ["Berg", "Costa", "Dahl", "Eriksen", "Fischer", "Garcia", "Horvat", "Ivanov", "Jensen",
        "Keller", "Lindqvist", "Moreau", "Novak", "Olsen", "Petrov", "Rossi", "Schmidt", "Weber"]
TOWNS = ["Bolzano", "Trento", "Verona", "Graz", "Linz", "Lyon", "Porto", "Bergen", "Turku", "Gdansk"]
MONTHS = ["January", "February", "March", "April", "June", "July", "August", "September",
          "October", "November", "December"]

COUNT_TEMPLATES = [
    "{pron} has {n} children.",
    "{name} has {n} children with {poss} partner.",
    "{pron} and {poss} spouse have {n} children.",
    "The couple has {n} children and lives in {town}.",
    "Today {name} has {n} children and several grandchildren.",
]

DISTRACTORS = [
    "{name} was born on {month} {day}, {year} in {town}.",
    "In {year}, {pron_l} moved to {town}.",
    "{pron} scored {k} goals for the club.",
    "{pron} won {k} awards during {poss} career.",
    "About {pct}% of the voters supported {name} in {year}.",
    "{pron} earned ${m} million from the sale of the company.",
    "{pron} served {k} years in the army.",
    "{pron} wrote {k} books about the history of {town}.",
    "It was one of the reasons for {poss} success.",
    "The museum in {town} receives {big} visitors every year.",
]


@dataclass
class SyntheticCorpus:
    records: list = field(default_factory=list)      # corpus JSONL objects
    kb_rows: list = field(default_factory=list)      # (subject, predicate, object)
    gold: dict = field(default_factory=dict)         # (subject, predicate) -> count

    def write(self, corpus_path, kb_path=None, gold_path=None):
        with open(corpus_path, "w", encoding="utf-8", newline="\n") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
        if kb_path:
            with open(kb_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.writelines(f"{s}\t{p}\t{o}\n" for s, p, o in self.kb_rows)
        if gold_path:
            with open(gold_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.writelines(f"{s}\t{p}\t{c}\n" for (s, p), c in self.gold.items())

    def subset(self, subjects):
        subjects = set(subjects)
        return SyntheticCorpus(
            [r for r in self.records if r["subject"] in subjects],
            [row for row in self.kb_rows if row[0] in subjects],
            {k: v for k, v in self.gold.items() if k[0] in subjects},
        )


def _say(n, rng):
    return WORDS[n] if n < len(WORDS) and rng.random() < 0.5 else str(n)


def _fill(template, rng, person, **extra):
    return template.format(
        name=person["name"], pron=person["pron"], pron_l=person["pron"].lower(), poss=person["poss"],
        town=rng.choice(TOWNS), month=rng.choice(MONTHS), day=rng.randint(1, 28),
        year=rng.randint(1900, 2015), k=_say(rng.randint(1, 40), rng), pct=rng.randint(2, 98),
        m=rng.randint(2, 90), big=f"{rng.randint(10, 900)},000", **extra)


def _person(rng):
    female = rng.random() < 0.5
    return {"name": f"{rng.choice(FIRST)} {rng.choice(LAST)}",
            "pron": "She" if female else "He", "poss": "her" if female else "his"}


def child_corpus(n_docs: int, seed: int = 0, max_count: int = 9, kb_recall: float = 1.0,
                 n_distractors=(2, 5)) -> SyntheticCorpus:
    """Biographies stating "has N children" among distractor numbers.

    ``kb_recall`` < 1 drops child triples from the KB at random, imitating an
    incomplete KB (the stored count is then lower than the true count; pairs
    that lose every triple are absent).
    """
    rng = random.Random(seed)
    out = SyntheticCorpus()
    for i in range(n_docs):
        subject = f"Q{i:05d}"
        n = rng.randint(1, max_count)
        person = _person(rng)
        sents = [_fill(t, rng, person) for t in rng.sample(DISTRACTORS, rng.randint(*n_distractors))]
        sents.insert(rng.randint(0, len(sents)),
                     _fill(rng.choice(COUNT_TEMPLATES), rng, person, n=_say(n, rng)))
        out.records.append({"subject": subject, "predicate": "child", "text": " ".join(sents)})
        out.gold[(subject, "child")] = n
        for c in range(n):
            if rng.random() < kb_recall:
                out.kb_rows.append((subject, "child", f"{subject}_c{c}"))
    return out


def composition_corpus(n_docs: int, seed: int = 0, prefix: str = "C", sons=None,
                       daughters=None) -> SyntheticCorpus:
    """Documents giving the count as "X sons and Y daughters".

    Fix ``sons``/``daughters`` to get one phrase shape throughout.
    """
    rng = random.Random(seed)
    out = SyntheticCorpus()
    fixed_sons, fixed_daughters = sons, daughters
    for i in range(n_docs):
        subject = f"{prefix}{i:05d}"
        sons = fixed_sons or rng.randint(1, 4)
        daughters = fixed_daughters or rng.randint(1, 4)
        person = _person(rng)
        s_word = "son" if sons == 1 else "sons"
        d_word = "daughter" if daughters == 1 else "daughters"
        core = f"{person['pron']} has {_say(sons, rng)} {s_word} and {_say(daughters, rng)} {d_word}."
        sents = [_fill(t, rng, person) for t in rng.sample(DISTRACTORS, 2)] + [core]
        rng.shuffle(sents)
        out.records.append({"subject": subject, "predicate": "child", "text": " ".join(sents)})
        out.gold[(subject, "child")] = sons + daughters
        out.kb_rows.extend((subject, "child", f"{subject}_c{c}") for c in range(sons + daughters))
    return out
