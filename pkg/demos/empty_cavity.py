"""Empty cavity between ideal mirrors.

The full (kappa, kpar) quadrature with reflection coefficients -1 on both
sides is checked against the closed form -pi^2 / (240 d^4), then converted to
pascals for a few physical separations.
"""
import numpy as np

from casimir_cslice import pressure_ideal, run_empty_cavity
from casimir_cslice.stress import ideal_cavity_stress_radial, pressure_si


if __name__ == "__main__":
    print("d       numeric             closed form         rel_err   nodes")
    for d in (0.5, 1.0, 2.0, 4.0):
        r = run_empty_cavity(d)
        print(f"{d:<7g} {r.pressure_numeric:<19.12e} {r.pressure_analytic:<19.12e} "
              f"{r.rel_err:.1e}  {r.nodes}")

    # the same number from the one-dimensional integral over w = sqrt(kappa^2 + kpar^2)
    one_d = -ideal_cavity_stress_radial(1.0).sigma_xx
    print(f"\n1D path at d = 1: {one_d:.15e}  (closed form {pressure_ideal(1.0):.15e})")

    # dimensionless P d^4 / (hbar c) -> pascals for d given in metres
    print("\nseparation    pressure")
    for d_m in (1e-7, 1e-6, 1e-5):
        print(f"{d_m:8.0e} m   {pressure_si(pressure_ideal(1.0), d_m):.4e} Pa")

    # pressure magnitude falls as d^-4
    ds = np.array([0.5, 1.0, 2.0])
    slope = np.polyfit(np.log(ds), np.log([-pressure_ideal(d) for d in ds]), 1)[0]
    print(f"\nlog-log slope of |P| against d: {slope:.6f}")
