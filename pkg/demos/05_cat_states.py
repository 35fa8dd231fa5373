"""Prepare Schrodinger-cat states with the balanced degenerate model.

With both detunings equal and both couplings balanced, the evolution is a
qubit-conditioned displacement: the resonator branches into two coherent
states of opposite amplitude entangled with the sigma_x eigenstates.
Measuring the qubit in |e>/|g> heralds the odd/even superposition.
"""

import math

import numpy as np

from modrabi import (HilbertSpace, conditional_cat, cat_evolution,
                     conditional_probability, cross_parity_population,
                     magnus_phase)

TWO_PI = 2 * math.pi
MHZ = TWO_PI * 1e6

ratio = 1.2                    # effective coupling over effective frequency
omega_eff = 35.03 * MHZ
g_eff = ratio * omega_eff
space = HilbertSpace(1, 40)

print("displacement amplitude along the preparation:")
for frac in (0.25, 0.5, 0.75, 1.0):
    t = frac * math.pi / omega_eff
    ph = magnus_phase(g_eff, omega_eff, t)
    print(f"  t = {frac:.2f} * pi/omega_eff: |xi| = {abs(ph.xi):.4f} "
          f"(max possible {2 * ratio})")

t0 = math.pi / omega_eff       # half period: largest separation
psi = cat_evolution(g_eff, omega_eff, t0, space)
xi = magnus_phase(g_eff, omega_eff, t0).xi

for outcome in ("g", "e"):
    cat, prob = conditional_cat(psi, outcome)
    print(f"\nqubit measured '{outcome}': {cat.parity} cat, "
          f"probability {prob:.6f} "
          f"(closed form {conditional_probability(xi, outcome):.6f})")
    pops = np.abs(cat.state.amplitudes) ** 2
    largest = np.argsort(pops)[::-1][:4]
    for n in sorted(largest):
        print(f"    Fock {n:2d}: population {pops[n]:.4f}")
    print(f"    weight on the wrong parity: {cross_parity_population(cat):.2e}")
