"""Far-point separation versus projections lying between, in the plane and in R^2 x [0, eps]."""
import numpy as np

from unitlayers.analysis import SeparationConfig, gamma_check, gamma_hat_check, omega_check
from unitlayers.layer_core import LayerPoint, LayerSpec

spec = LayerSpec.strip(0.5)
x1, x2, y = LayerPoint([0.0], [0.0]), LayerPoint([2.0], [0.3]), LayerPoint([1.0], [0.1])
print("between:", omega_check(x1, x2, y), " separated (norm):", gamma_check(x1, x2, y, spec))
print("separated (hop counts):", gamma_check(x1, x2, y, spec, SeparationConfig(metric="hop")),
      " <- integer ties at every far point")

rng = np.random.default_rng(0)
for eps in (0.4, 0.9, 1.7):
    s = LayerSpec.strip(eps)
    trips = [[LayerPoint([rng.uniform(-3, 3)], [rng.uniform(0, eps)]) for _ in range(3)] for _ in range(300)]
    agree = sum(omega_check(*t) == gamma_check(*t, s) for t in trips)
    print(f"eps={eps}: {agree}/300 agree")

spec2 = LayerSpec(2, 1, 3.0, 0.5)
xs = [LayerPoint([0, 0], [0]), LayerPoint([4, 0], [0.2]), LayerPoint([0, 4], [0.4])]
for q in ([1, 1], [3, 3]):
    v = gamma_hat_check(xs, LayerPoint(q, [0.1]), spec2)
    print(f"p=3, pr(y)={q}: inside hull {v.omega}, separated {v.gamma}")
