"""Second-order Wirtinger jets, two independent ways.

The algebraic route propagates (value, d, dbar, ddbar) through the
expression tree; the oracle route assembles the same slots from central
divided differences on the 2n real coordinates.  They agree to the
oracle's truncation error, which is the whole point: neither knows how
the other works.
"""

import numpy as np

import hsclab
from hsclab import dsl, wirtinger

point = np.array([0.35 - 0.2j, 0.1 + 0.4j])
src = "exp(z1*conj(z1))/(1+z2*conj(z2))^2"
expr = dsl.parse(src, 2)

algebraic = dsl.eval_jet(expr, 2, point.reshape(1, 2))
oracle = wirtinger.fd_jet(lambda z: dsl.eval_value(expr, z), point)

print(f"f = {src} at {point.tolist()}")
print(f"  value   algebraic {complex(algebraic.value[0]):.12f}")
print(f"          oracle    {complex(oracle.value):.12f}")
for k in range(2):
    print(f"  d/dz{k + 1}  algebraic {complex(algebraic.d[0, k]):+.10f}"
          f"   oracle {complex(oracle.d[k]):+.10f}")
gap = np.abs(algebraic.ddbar[0] - oracle.ddbar).max()
print(f"  mixed second-derivative block gap: {gap:.3e} "
      f"(oracle step {wirtinger.FD_STEP:g})")

# the same machinery drives plain jet arithmetic on coordinate seeds
z1 = wirtinger.seed(1, [0.5 + 0.1j], 0)
f = (1.0 + z1 * z1.conjugate()) ** -2
print("\njet of 1/(1+|z|^2)^2 at 0.5+0.1i:")
print(f"  value {complex(f.value):.10f}, ddbar {complex(f.ddbar[0, 0]):.10f}")

print("\njet arithmetic refuses division at a zero:")
try:
    z1 = wirtinger.seed(1, [0j], 0)
    z1.reciprocal()
except hsclab.SingularPointError as exc:
    print(f"  SingularPointError: {exc}")
