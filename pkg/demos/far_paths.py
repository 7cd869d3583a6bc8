"""Hop distances in a thin strip: far pairs follow the ceiling, a near pair does not."""
import sys
from pathlib import Path

from unitlayers import LayerPoint, LayerSpec, hop_distance, lp_dist
from unitlayers.svg import render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
spec = LayerSpec.strip(0.5)

a = LayerPoint([0.0], [0.2])
for x in (17.3, 20.5, 33.0):
    b = LayerPoint([x], [0.2])
    iv = hop_distance(a, b, spec)
    print(f"|ab| = {lp_dist(a, b, spec):6.2f}  hops = {iv.upper}  exact = {iv.exact}")

b = LayerPoint([20.5], [0.2])
render_svg(hop_distance(a, b, spec).witness, out / "far_path.svg", spec.eps)
print("wrote", out / "far_path.svg")

# each hop in this strip moves at least sqrt(3)/2 sideways, so a short gap costs many hops
near = hop_distance(LayerPoint([0.0], [0.0]), LayerPoint([0.5], [0.0]), spec)
print(f"(0,0) to (0.5,0): hops in [{near.lower}, {near.upper}], witness has {near.witness.edges} edges")
