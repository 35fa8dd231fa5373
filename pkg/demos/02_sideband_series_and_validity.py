"""Inspect the sideband series behind the effective model.

The modulated coupling expands into a double series of terms
J_n1(2 eta1) J_n2(2 eta2) e^{i nu t}; the effective model keeps exactly one
term of each family and drops the rest.  This script lists the largest
discarded terms and the audit that decides whether dropping them was safe.
"""

import math

from modrabi import (DriveParams, SystemParams, detunings,
                     sideband_amplitudes, validity_report)

TWO_PI = 2 * math.pi
GHZ = TWO_PI * 1e9
MHZ = TWO_PI * 1e6

system = SystemParams(epsilon=5.4 * GHZ, omega=2.2 * GHZ, g=70 * MHZ)
drive = DriveParams(omega1=3.2 * GHZ, omega2=6.759 * GHZ,
                    eta1=2.296 / 3.2, eta2=4.849 / 6.759)
det = detunings(system, drive)

alpha, beta = sideband_amplitudes(drive, det, n_max=3)

print("rotating-family terms sorted by coupling, top 6:")
for term in sorted(alpha, key=lambda t: -abs(t.coefficient))[:6]:
    kept = " <- kept" if (term.n1, term.n2) == (-1, 0) else ""
    print(f"  (n1,n2)=({term.n1:+d},{term.n2:+d})  |coef|={abs(term.coefficient):.4f}  "
          f"freq={term.frequency / GHZ:+.3f} GHz{kept}")

print("\ncounter-rotating-family terms, top 6:")
for term in sorted(beta, key=lambda t: -abs(t.coefficient))[:6]:
    kept = " <- kept" if (term.n1, term.n2) == (0, -1) else ""
    print(f"  (n1,n2)=({term.n1:+d},{term.n2:+d})  |coef|={abs(term.coefficient):.4f}  "
          f"freq={term.frequency / GHZ:+.3f} GHz{kept}")

report = validity_report(system, drive)
print("\napproximation audit:")
print(f"  dispersive ratio g/|Delta|   = {report.dispersive_ratio:.4f} "
      f"(< {report.dispersive_max}: {report.dispersive_ok})")
print(f"  detuning ratio               = {report.detuning_ratio:.4f} "
      f"(< {report.detuning_max}: {report.detuning_ok})")
print(f"  worst discarded-term margin  = {report.rwa_margin:.1f} "
      f"(> {report.rwa_min}: {report.rwa_ok})")
print(f"  all checks pass: {report.ok}")

# crank the bare coupling up to break the dispersive condition
strong = SystemParams(epsilon=5.4 * GHZ, omega=2.2 * GHZ, g=3.0 * GHZ)
print("\nwith g = 3 GHz the audit fails:",
      validity_report(strong, drive).dispersive_ok)
