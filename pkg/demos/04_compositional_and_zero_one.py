"""Counts that are never written as a single number.

"two sons and one daughter" needs summing, and "she never married" or
"their only child" state a count of zero or one without any digit.
"""

from cardex import PredictConfig, apply_zero_one, make_document, predict_document
from cardex.crf import CrfModel

# A hand-set model: any candidate number gets CARD probability 0.9. This
# isolates the prediction logic from training.
model = CrfModel.zeros(["C=1"])
model.state_weights[0] = [1.1, -1.1]

doc = make_document("Q1", "child", "He has two sons and one daughter from his first marriage.")
for compositional in (False, True):
    pred = predict_document(model, doc, PredictConfig(enable_compositional=compositional))
    print(f"compositional={compositional!s:<5}  count={pred.count}  mode={pred.mode.value}  "
          f"confidence={pred.confidence:.3f}")

print()
for text in ["She never married.", "Their only child, Maria, became a painter.",
             "In 2001 they adopted a boy from Peru.", "He had no children.", "He has 4 children."]:
    p = apply_zero_one(make_document("Q2", "child", text))
    print(f"{text:<45} -> {p.count if p else 'no translation'}")

# Zero/one translation only applies when the CRF abstains.
doc = make_document("Q3", "child", "He never married. He raised 2 nephews.")
pred = predict_document(model, doc, PredictConfig(enable_zero_one=True))
print(f"\nCRF answer wins over translation: count={pred.count} mode={pred.mode.value}")
