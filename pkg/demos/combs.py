"""Combs, modified combs and sandwiches, with SVG output."""
import sys
from fractions import Fraction
from pathlib import Path

from unitlayers import gadgets
from unitlayers.exact import sqrt_text
from unitlayers.layer_core import LayerSpec
from unitlayers.svg import render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")

for N, M in [(1, 1), (3, 2), (4, 5), (9, 10)]:
    print(f"({N},{M})-comb needs width {sqrt_text(N, M)} = {gadgets.comb_min_width(N, M):.5f}")

comb = gadgets.build_extreme_comb(4, 5, 0.92)
print("extreme (4,5)-comb valid:", gadgets.validate_comb(comb, LayerSpec.strip(0.92)).valid)
render_svg(comb, out / "comb_4_5.svg", 0.92)

# exactly on the threshold 4/5 of the (6,5)-comb
print("comb(6,5) at 4/5:", gadgets.comb_exists(6, 5, Fraction(4, 5)))
print("modified comb(6,5) at 9/5:", gadgets.modified_comb_exists(6, 5, Fraction(9, 5)))

mc = gadgets.build_modified_comb(4, 5, 1.92, side="top")
print("modified (4,5)-comb at 1.92 valid:", gadgets.validate_modified_comb(mc, 1.92).valid)

s = gadgets.build_sandwich(3, 3.0, cols=3)
print(f"3-sandwich window: {len(s.points())} points, {len(gadgets.border_points(s))} on the border")
render_svg(s, out / "sandwich_3.svg", 3.0)
print("wrote", out / "comb_4_5.svg", "and", out / "sandwich_3.svg")
