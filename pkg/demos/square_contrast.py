"""Square lattice on either side of the critical coupling.

Below beta_c the first zero settles quickly and the susceptibility per site
levels off.  Above it the zeros pinch the real axis and chi keeps climbing.
Only boxes up to 7x7 are within reach, so this is a qualitative picture.
"""

from leeyang import alpha1_extrapolate, critical_beta, susceptibility_trend

print(f"beta_c = {critical_beta(2):.8f}\n")
for beta in ("0.3", "0.44069", "0.6"):
    alphas = alpha1_extrapolate(2, beta, 3).floats()
    chi = susceptibility_trend(2, beta, 3)
    print(f"beta {beta:>8}:  alpha_1 by box  " + "  ".join(f"{a:.5f}" for a in alphas))
    print(f"{'':16}chi by box      " + "  ".join(f"{c:.3f}" for c in chi.values))
    print(f"{'':16}looks bounded: {chi.bounded}\n")
