"""Numeric tagging: which numbers in a sentence could be a count?

Dates, money, percents and durations are tagged first; what remains as
NUMBER with an integer value is a candidate cardinality.
"""

from cardex import classify_numbers, is_candidate, is_nummod, make_sentence, parse_number_word

SENTENCES = [
    "In 1984 he married Anna; they have three children.",
    "The film earned $5 million and 75% of critics liked it.",
    "She served two terms and spent six years in the senate.",
    "It was one of the reasons for his 28th victory.",
    "The couple had twins in the 1990s.",
]

for text in SENTENCES:
    sent = classify_numbers(make_sentence(text))
    print(text)
    for tok in sent.tokens:
        if tok.num_tag == "NONE":
            continue
        flags = []
        if is_candidate(tok):
            flags.append("candidate")
            if is_nummod(sent, tok.index):
                flags.append("modifies a noun")
        print(f"  {tok.surface:<10} {tok.num_tag:<9} value={tok.num_value!s:<5} {', '.join(flags)}")
    print()

for word in ["twenty-one", "two hundred five", "dozen", "trilogy", "4th", "3.5"]:
    print(f"parse_number_word({word!r}) = {parse_number_word(word)}")
