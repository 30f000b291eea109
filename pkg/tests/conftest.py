import functools

import pytest

from leeyang.lattice import make_rectangle
from leeyang.partition import partition
from leeyang.zeros import find_zeros_adaptive

# Domains and temperatures used by the corpus-wide checks: chains up to 24
# sites and 2D rectangles up to 7x7, at beta <= 1.
CORPUS_BETAS = ("0", "0.25", "0.44069", "0.6", "1")


def corpus_domains():
    doms = [make_rectangle(1, [n]) for n in range(1, 25)]
    doms += [make_rectangle(2, [a, b]) for a in range(2, 8) for b in range(a, 8)]
    return doms


@functools.lru_cache(maxsize=None)
def solved(domain, beta, precision=30):
    """(polynomial, zero set) with the polynomial at the precision the zeros needed."""
    poly = partition(domain, beta, precision)
    zs = find_zeros_adaptive(poly, 1e-15)
    if zs.precision != poly.precision:
        poly = poly.with_precision(zs.precision)
    return poly, zs


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for the acceptance summary."""

    def record(number, title, passed, detail=""):
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
