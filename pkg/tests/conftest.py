from __future__ import annotations

import itertools
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from descent_kit.weierstrass import order, scalar_mul

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def small_points(curve, height=40, dens=(1, 2, 3, 4)):
    """Affine points with x = n/d^2, |n| <= height; cheap and enough to seed samples."""
    out = []
    for d in dens:
        for n in range(-height * d * d, height * d * d + 1):
            x = Fraction(n, d * d)
            if x.denominator != d * d:
                continue
            out.extend(curve.lift_x(x))
    return out


def sample_points(curve, count, height=40, max_mult=8):
    """Up to ``count`` distinct points: torsion plus small multiples and sums of seeds."""
    seeds = small_points(curve, height)
    free = [P for P in seeds if order(P) is None]
    pts = {P: None for P in seeds}
    for P in free:
        for k in range(-max_mult, max_mult + 1):
            pts.setdefault(scalar_mul(k, P), None)
            if len(pts) >= count:
                return list(pts)
    for P, Q in itertools.combinations(free, 2):
        pts.setdefault(P + Q, None)
        pts.setdefault(P - Q, None)
        if len(pts) >= count:
            break
    return list(pts)


@pytest.fixture(scope="session")
def euler_pair():
    from descent_kit.two_descent import make_td_pair

    return make_td_pair(0, -1)


def many_points(curve, count, height=30, gens=3):
    """At least ``count`` points k1 G1 + k2 G2 + T, growing the box |k| <= r until full.

    Returns fewer only when the seeds are all torsion. Coordinates grow like
    r^2, so spreading over two generators keeps them far lower than multiples
    of one.
    """
    from descent_kit.weierstrass import torsion_subgroup

    seeds = small_points(curve, height)
    free = list(dict.fromkeys(P for P in seeds if order(P) is None))[:gens]
    tors = torsion_subgroup(curve) if curve.a.denominator == 1 and curve.b.denominator == 1 else [curve.infinity]
    pts = dict.fromkeys(seeds)
    if not free:
        return list(pts)
    G = free if len(free) > 1 else free * 2
    mult = {(i, 0): curve.infinity for i in range(len(G))}

    def kG(i, k):
        # multiples built by one addition each from the previous one
        if (i, k) not in mult:
            step = G[i] if k > 0 else -G[i]
            mult[(i, k)] = kG(i, k - 1 if k > 0 else k + 1) + step
        return mult[(i, k)]

    r = 0
    while len(pts) < count:
        r += 1
        for i, j in itertools.combinations(range(len(G)), 2):
            for k1 in range(-r, r + 1):
                for k2 in range(-r, r + 1):
                    if max(abs(k1), abs(k2)) != r:
                        continue
                    base = kG(i, k1) + kG(j, k2)
                    for T in tors:
                        pts.setdefault(base + T, None)
    return list(pts)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
