#!/usr/bin/env python3
"""Trace B_max against percentage squeezing and locate where the violation
dies.  Writes sweep.csv; render it with the companion figures package:

    cvbell-figures plot-sweep sweep.csv sweep.png
"""

from cvbell import sweep_squeezing, write_sweep_csv

result = sweep_squeezing(1.0, 99.0, 15)

print(f"{'% squeezing':>12} {'gain':>8} {'B_max':>8}")
for row in result.rows:
    flag = " <- below classical bound" if row.b_max < 2.0 else ""
    print(f"{row.percent_squeezing:12.2f} {row.gain:8.4f} {row.b_max:8.4f}{flag}")

print(f"\nviolation lost at {result.violation_threshold:.2f}% squeezing")

write_sweep_csv(result, "sweep.csv")
print("wrote sweep.csv")
