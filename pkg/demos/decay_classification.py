"""Reading the singularity order off the decay across scales.

At a point of the edge the best-aligned coefficient decays like
2^(-j(3/4 + n)) when the function's first n normal derivatives are
continuous across the edge. Fitting log2 magnitudes over three scales and
rounding the exponent recovers n. Away from the edge the decay is much
faster.

    python demos/decay_classification.py              # scales 6, 8, 10: ~1 minute, ~2 GB
    python demos/decay_classification.py --j 4,6,8    # quick, but too coarse to classify n = 1, 2
"""
import argparse

from trigshear.analysis import DecayProbe, run_decay
from trigshear.cartoon import single_order_cartoon

ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
ap.add_argument("--j", default="6,8,10")
args = ap.parse_args()
scales = [int(s) for s in args.j.split(",")]

probes = [DecayProbe("edge", "edge", (2.0, 0.0), 0.0), DecayProbe("centre", "off-edge", (0.0, 0.0))]
print(f"{'cartoon':>9} {'probe':>7} {'slope':>8} {'n_hat':>6} {'margin':>7}  label")
for n in (0, 1, 2):
    for r in run_decay(single_order_cartoon(n), scales, probes):
        print(f"{'order ' + str(n):>9} {r.tag:>7} {r.fit.slope:8.3f} {r.order:6d} {r.margin:7.3f}  {r.label}")
print("expected edge slopes: -0.75, -1.75, -2.75")
print("note: with N = 8 * 2^j samples the jump aliases, so the off-edge value of the")
print("order-0 cartoon levels off instead of falling faster than 2^(-3j).")
