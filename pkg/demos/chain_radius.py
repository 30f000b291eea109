"""Open chains: how the first zero closes in on the infinite-chain branch point.

Every finite chain keeps its zeros off the real axis, so the free energy is
analytic in a strip |Im h| < alpha_1.  As the chain grows the strip narrows,
and for the infinite chain it ends at arcsin(exp(-2 beta)).

    python demos/chain_radius.py
"""

import numpy as np

from leeyang import alpha1_extrapolate, exact_1d_radius

for beta in ("0.25", "0.5", "1"):
    est = alpha1_extrapolate(1, beta, 30)
    alphas = np.array(est.floats())
    exact = exact_1d_radius(beta)
    print(f"beta = {beta}")
    for n, a in zip(est.ns[::6], alphas[::6]):
        print(f"  chain of {2 * n + 1:3d} sites   alpha_1 = {a:.8f}   excess {a - exact:.2e}")
    print(f"  fitted limit {est.limit:.6f} (p = {est.power}), exact {exact:.6f}")
    # the excess falls roughly like 1/L^2; with fewer boxes the fit tends to pick p = 1 at beta = 1
    L = 2 * np.array(est.ns) + 1
    slope = np.polyfit(np.log(L[-6:]), np.log(alphas[-6:] - exact), 1)[0]
    print(f"  log-log slope of the excess over the last boxes: {slope:.2f}\n")
