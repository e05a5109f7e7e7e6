"""A C-slice wafer inside an ideal-mirror cavity.

A C-slice with compression m has eps = mu = diag(1/m, 1/m, m). Seen from
outside it behaves like a stretch of vacuum of width integral(dz / m), so the
pressure is the empty-cavity value at the effective width
d' = d - Delta + integral(dz / m). Slicing the wafer more finely changes
nothing, because neighbouring C-slices do not reflect.
"""
import math

from casimir_cslice import (CompressionProfile, compression_factor, effective_length,
                            pressure_cslice_analytic, run_cslice)
from casimir_cslice.materials import mean_compression


def show(profile, N_list):
    d_eff = effective_length(1.0, profile)
    print(f"\n{profile.describe()} on [{profile.a}, {profile.b}]: d' = {d_eff:.12f}, "
          f"target P = {pressure_cslice_analytic(1.0, profile):.12e}")
    for r in run_cslice(1.0, profile, N_list):
        print(f"  N = {r.N:<5d} P = {r.pressure_numeric:.12e}  rel_err = {r.rel_err:.1e}")


if __name__ == "__main__":
    # constant wafers: m < 1 stretches the cavity (weaker force), m > 1 compresses it
    show(CompressionProfile.constant(0.5, 0.4, 0.6), [4, 16, 64, 256])
    show(CompressionProfile.constant(2.0, 0.4, 0.6), [4, 16, 64, 256])

    # a graded wafer: the effective width uses the harmonic mean of m, and the
    # numeric value approaches it as the midpoint slicing of m(z) is refined
    graded = CompressionProfile.linear(1.0, 3.0, 0.4, 0.6)
    show(graded, [64, 256, 1024, 2048])
    print(f"\n  harmonic mean of m = {compression_factor(graded):.6f}, "
          f"arithmetic mean = {mean_compression(graded):.6f}")
    wrong = CompressionProfile.constant(mean_compression(graded), 0.4, 0.6)
    print(f"  using the arithmetic mean would give P = {pressure_cslice_analytic(1.0, wrong):.8e}"
          f" instead of {pressure_cslice_analytic(1.0, graded):.8e}")
    print(f"  virtual width = {0.1 * math.log(3.0):.9f}")
