"""Exponent bookkeeping for a few spectral configurations.

    python demos/mixing_rates.py
"""
import json

from compser.rates import SpectralData, rate_report

cases = {
    "convex cocompact surface": SpectralData(1, 0.9, 0.6),
    "no exceptional spectrum": SpectralData(2, 1.7),
    "lattice, hyperbolic 3-space": SpectralData(2, 2.0, 1.2),
    "eigenvalue list": SpectralData(1, 0.9, eigenvalues=[0.09, 0.21]),
}
for name, data in cases.items():
    rep = rate_report(data)
    print(f"{name}: eta={rep['eta']:.3f} beta={rep['beta']:.3f} lambda={rep['lambda']:.3f}")
print(json.dumps(rate_report(cases["lattice, hyperbolic 3-space"])["diagnostics"], indent=2))
