"""A short tour of the checks that tie the cumulants to the zeros and the Ursell functions.

Pick a small lattice, compute everything exactly, and print each check with
its gap and tolerance.  Change DOMAIN or BETA to poke at other cases.
"""

import mpmath

from leeyang import cumulants, find_zeros, make_rectangle, partition, run_suite, ursell

DOMAIN = make_rectangle(2, [3, 3])
BETA = "0.35"

poly = partition(DOMAIN, BETA, 30)
zs = find_zeros(poly)
print(f"{DOMAIN.num_sites} sites, {len(zs.angles)} distinct zero angles in (0, pi)")
print("angles:", ", ".join(f"{float(a):.5f}" for a in zs.angles[:5]), "...")

cv = cumulants(poly, 8)
with mpmath.workdps(30):
    print("u_2k per site:", ", ".join(mpmath.nstr(cv[k] / DOMAIN.num_sites, 10) for k in (2, 4, 6, 8)))

# corner-to-center correlation and a four-point Ursell function
print("u_2(corner, centre) =", mpmath.nstr(ursell(DOMAIN, BETA, [0, 4]), 10))
print("u_4(0, 1, 3, 4)     =", mpmath.nstr(ursell(DOMAIN, BETA, [0, 1, 3, 4]), 10))

print()
for r in run_suite(DOMAIN, BETA):
    mark = "ok " if r.passed else "BAD"
    print(f"{mark} {r.name:32s} gap {r.gap: .3e}  tol {r.tolerance:.1e}")
