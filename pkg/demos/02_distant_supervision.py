"""Distant supervision: turning KB counts into token labels.

The same document is labeled under each mode so the differences are easy
to see. The KB says the subject has 3 children, but one of the matching
numbers is not about children at all.
"""

from cardex import KBStore, Mode, SupervisionConfig, annotate, make_document

text = ("She has two sons and one daughter. Her team won 3 titles. "
        "Altogether she has 3 children and 4 grandchildren.")
doc = make_document("Q1", "child", text)
kb = KBStore({("Q1", "child"): 3})

for mode in Mode:
    print(f"mode = {mode.value}")
    for _, seqs in annotate([doc], kb, SupervisionConfig(mode)):
        for sent, seq in zip(doc.sentences, seqs):
            marked = " ".join(f"[{t.surface}]" if y == "CARD" else t.surface
                              for t, y in zip(sent.tokens, seq.labels))
            print("   ", marked)
    print()

# Every mode labels "3 titles": the number matches and it modifies a noun,
# so this is the noise a distantly supervised model has to average out.
# "resilient" adds "4 grandchildren" because 4 >= 3, and only "comp" finds
# the split count in "two sons and one daughter".
