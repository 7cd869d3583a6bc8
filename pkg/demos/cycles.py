"""Thinnest strips holding short odd cycles of the unit distance graph."""
import math

from unitlayers.gadgets import CycleConfig, odd_cycle_min_width

cfg = CycleConfig(restarts=8)
for k in (3, 5, 7):
    print(f"k={k}: width ~ {odd_cycle_min_width(k, cfg):.4f}")
print(f"sqrt(3)/2 = {math.sqrt(3) / 2:.4f}")
