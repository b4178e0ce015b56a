"""Left-M-invariant vectors in a non-spherical series have no main term.

Takes d = 2, upsilon = 1, projects random vectors on the two lowest
K-types to the M-invariant line, and prints every main-term summand next
to the spherical control.  The matrix coefficient itself is sampled at a
few times to show the faster decay.

    python demos/vanishing_main_term.py
"""
import math

from compser.asymptotics import main_term, matcoef_direct
from compser.liealg import make_label
from compser.suites import spherical_control, vanishing_probes

for s in (1.2, 1.5):
    label = make_label(2, s, 1)
    (u, v), = vanishing_probes(label, 12, seed=0)
    mt = main_term(u, v)
    worst = max(abs(x) for x in mt.summands.values())
    print(f"s = {s}: largest main-term summand {worst:.2e}, "
          f"spherical control {spherical_control(2, s):.4f}")
    for t in (2.0, 3.0, 4.0):
        val = abs(matcoef_direct(u, v, t))
        print(f"   t={t}: |<U(a_t)u, v>| = {val:.3e}, times exp({2 - s + min(2 * s - 2, 1):.1f} t) "
              f"= {val * math.exp((2 - s + min(2 * s - 2, 1)) * t):.4f}")
