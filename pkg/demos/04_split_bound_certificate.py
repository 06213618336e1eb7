"""The quartic split bound, from exact weights to random verification.

Block-structured curvature tensors with a fiber lower bound K0, a mixed
entry bound K1, and a base lower bound K2 admit a pointwise sectional
lower bound once K2 clears K1 times a combinatorial ratio.  The weights
that make it work are chosen so every constraint term is exactly equal:
that equalization is rational arithmetic, so we can assert it with ==.
"""

from fractions import Fraction

import hsclab

# the reference instance: fiber bound 8, mixed bound 1, dimensions (2, 1)
w = hsclab.choose_weights(8.0, 1.0, 2, 1)


def as_rational(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10 ** 6)


print(f"weights squared: a^2={as_rational(w.a_sq)}, b^2={as_rational(w.b_sq)}, "
      f"c^2={as_rational(w.c_sq)}, d^2={as_rational(w.d_sq)}")
print(f"required base/mixed ratio: {w.required_ratio:g}")

facts = hsclab.weight_identities(8.0, 1.0, 2, 1)
for key, val in sorted(facts.items()):
    print(f"  {key}: {val}")

# the three product inequalities behind the bound, on random moduli
rep = hsclab.product_inequality_check(w.a, w.b, w.c, w.d, trials=20000)
print(f"\nproduct inequalities over {rep['trials']} random moduli: "
      f"{rep['violations']} violations, worst slack {rep['worst_slack']:.3e}")

# a random tensor honoring the hypotheses, checked at the critical level
w42 = hsclab.choose_weights(8.0, 1.0, 4, 2)
tensor = hsclab.random_block_tensor(8.0, 1.0, w42.base_required, 4, 2, seed=1)
hyp = hsclab.check_block_hypotheses(tensor, trials=5000)
bound = hsclab.split_bound_check(tensor, w42, trials=5000)
print(f"\nrandom 4-dim tensor with 2 fiber directions:")
print(f"  hypotheses hold: {hyp['ok']}")
print(f"  certified bound: {bound['violations']} violations over "
      f"{bound['trials']} directions, strict positivity "
      f"{bound['all_strictly_positive']}")
