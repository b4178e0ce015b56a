"""Spherical matrix coefficients on the hyperbolic plane and their decay.

For d = 1 the coefficient <U^s(a_t) 1, 1> is computed two ways (sampling on
K and the N-bar integral), compared with its main term exp((s-1) t) c, and
the residual slope is fitted on t in [2, 8].

    python demos/spherical_decay.py
"""
import math

import numpy as np

from compser.asymptotics import certify_decay, main_term, matcoef_direct, matcoef_nbar
from compser.liealg import make_label
from compser.model import basis_vector

s = 0.75
label = make_label(1, s)
u = basis_vector(label, 32, (0, 0))
c = main_term(u, u).k_form.real

print(f"s = {s}, main term coefficient {c:.12f}")
print(f"{'t':>4} {'direct':>18} {'nbar':>18} {'ratio to main':>14}")
for t in range(0, 9, 2):
    a = matcoef_direct(u, u, float(t)).real
    b = matcoef_nbar(u, u, float(t)).real
    print(f"{t:4d} {a:18.14f} {b:18.14f} {a / (c * math.exp((s - 1) * t)):14.10f}")

rep = certify_decay(u, u, np.linspace(2, 8, 13), 0.05)
print(f"residual slope {rep.fitted_slope:.4f}, target {rep.target_slope:.4f}, pass={rep.passed}")
