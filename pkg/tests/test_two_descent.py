import itertools
import random

import pytest

from descent_kit.errors import DomainError, SingularCurveError
from descent_kit.status import ProvedIn, ProvedOut
from descent_kit.two_descent import (
    HomSpace2,
    alpha2,
    alpha2_image,
    alpha2_tilde,
    candidate_classes,
    class_mul,
    ker_index,
    make_td_pair,
    psi2,
    psi2_tilde,
    rank_bounds_2,
    two_torsion_count,
)
from descent_kit.weierstrass import make_curve, scalar_mul

from conftest import sample_points

FAMILIES = [(0, -1), (-2, 0), (0, -2), (2, 1), (3, 0), (-6, 1), (-1, 0)]


@pytest.fixture(scope="module")
def samples():
    out = {}
    for a, c in FAMILIES:
        pair = make_td_pair(a, c)
        out[(a, c)] = (pair, sample_points(pair.E, 30, 30, 4), sample_points(pair.Etilde, 30, 30, 4))
    return out


def test_make_pair_examples(euler_pair):
    assert euler_pair.E == make_curve(0, 1)
    assert euler_pair.Etilde == make_curve(-15, 22)
    assert euler_pair.P0.coords() == (-1, 0)
    assert euler_pair.P0_tilde.coords() == (2, 0)
    with pytest.raises(SingularCurveError, match="a = -3c"):
        make_td_pair(-3, 1)
    with pytest.raises(SingularCurveError, match="4a = -3c"):
        make_td_pair(-3, 2)


def test_psi_examples(euler_pair):
    p = euler_pair
    assert psi2(p, p.E.point(2, 3)) == p.Etilde.point(3, 2)
    assert psi2(p, p.P0).is_infinity
    assert psi2(p, p.E.infinity).is_infinity
    assert psi2_tilde(p, p.Etilde.point(3, 2)) == p.E.point(0, 1)
    assert psi2_tilde(p, p.P0_tilde).is_infinity
    assert psi2_tilde(p, p.Etilde.infinity).is_infinity
    with pytest.raises(DomainError):
        psi2(p, p.Etilde.point(3, 2))


def test_alpha_examples(euler_pair):
    p = euler_pair
    assert alpha2(p, p.E.infinity) == 1
    assert alpha2(p, p.P0) == 3
    assert alpha2(p, p.E.point(2, 3)) == 3
    assert alpha2_tilde(p, p.P0_tilde) == -3


def test_homspace_instance():
    # beta = -1 on the x^3 + 1 curve: N^2 = -M^4 - 3 M^2 q^2 - 3 q^4
    sp = HomSpace2(-1, -1, 3)
    assert sp.coeffs == (-1, -3, -3)


def test_image_examples(euler_pair):
    E = {s.cls: s for s in alpha2_image(euler_pair, "E")}
    assert {c for c, s in E.items() if s.state == "in"} == {1, 3}
    assert E[-1].status == ProvedOut("local", 3, 9)
    assert E[-3].status == ProvedOut("local", 3, 9)
    Et = alpha2_image(euler_pair, "Etilde")
    assert {s.cls for s in Et if s.state == "in"} == {1, -3}
    assert all(s.state == "out" for s in Et if s.cls in (-1, 3))
    q = make_td_pair(-1, 0)
    assert {s.cls: s.state for s in alpha2_image(q, "E")} == {1: "in", -1: "in"}


def test_ker_index_examples():
    assert ker_index(make_td_pair(0, -1)) == 2
    assert ker_index(make_td_pair(-1, 0)) == 1
    assert ker_index(make_td_pair(1, 0)) == 2
    assert two_torsion_count(make_td_pair(-1, 0)) == 4


def test_rank_examples():
    for a, c in ((0, -1), (-1, 0), (0, -4), (0, -16)):
        rb = rank_bounds_2(make_td_pair(a, c))
        assert rb.lower == 0, (a, c)
    assert rank_bounds_2(make_td_pair(0, -1)).upper == 0
    assert rank_bounds_2(make_td_pair(0, -4)).upper == 0


def test_positive_rank_detected():
    # y^2 = x^3 - 2x carries (-1, 1) of infinite order
    rb = rank_bounds_2(make_td_pair(-2, 0))
    assert rb.lower >= 1


def test_negative_definite_space_is_sign_excluded():
    from descent_kit.two_descent import decide_space

    # local bound 1 disables residue checks so the sign test decides
    st = decide_space(HomSpace2(-1, 0, 4), make_curve(4, 0), 50, 1)
    assert st == ProvedOut("sign")


def test_isogeny_identities(samples):
    for pair, pts, pts_t in samples.values():
        for P in pts:
            assert psi2_tilde(pair, psi2(pair, P)) == scalar_mul(2, P)
        for Pt in pts_t:
            assert psi2(pair, psi2_tilde(pair, Pt)) == scalar_mul(2, Pt)


def test_psi_homomorphism(samples):
    rng = random.Random(3)
    for pair, pts, pts_t in samples.values():
        for _ in range(40):
            P, Q = rng.choice(pts), rng.choice(pts)
            assert psi2(pair, P + Q) == psi2(pair, P) + psi2(pair, Q)
            P, Q = rng.choice(pts_t), rng.choice(pts_t)
            assert psi2_tilde(pair, P + Q) == psi2_tilde(pair, P) + psi2_tilde(pair, Q)


def test_alpha_homomorphism(samples):
    for pair, pts, pts_t in samples.values():
        for P, Q in itertools.product(pts[:15], repeat=2):
            assert alpha2(pair, P + Q) == class_mul(alpha2(pair, P), alpha2(pair, Q))
        for P, Q in itertools.product(pts_t[:15], repeat=2):
            assert alpha2_tilde(pair, P + Q) == class_mul(alpha2_tilde(pair, P), alpha2_tilde(pair, Q))


def test_kernel_is_image(samples):
    for pair, pts, pts_t in samples.values():
        for Pt in pts_t:
            assert alpha2(pair, psi2_tilde(pair, Pt)) == 1
        for P in pts:
            assert alpha2_tilde(pair, psi2(pair, P)) == 1


def test_statuses_consistent_with_points(samples):
    for (a, c), (pair, pts, pts_t) in samples.items():
        for side, sample in (("E", pts), ("Etilde", pts_t)):
            st = alpha2_image(pair, side, search_bound=60)
            by = {s.cls: s for s in st}
            assert set(by) == set(candidate_classes(pair.side(side).B))
            for P in sample:
                assert by[alpha2(pair, P, side)].state != "out", (a, c, side, P)
            ins = [s.cls for s in st if s.state == "in"]
            assert all(class_mul(x, y) in ins for x in ins for y in ins)
            assert len(ins) & (len(ins) - 1) == 0
            for s in st:
                if isinstance(s.status, ProvedIn) and s.status.point is not None:
                    x, y = s.status.point
                    P = pair.side(side).curve.point(x, y)
                    if s.status.source != "closure":
                        assert alpha2(pair, P, side) == s.cls


def test_rank_bound_inequalities(samples):
    for pair, _, _ in samples.values():
        rb = rank_bounds_2(pair, search_bound=60)
        denom = ker_index(pair) * two_torsion_count(pair)
        lo = rb.image_lower[0] * rb.image_lower[1]
        hi = rb.image_upper[0] * rb.image_upper[1]
        assert 2**rb.lower * denom <= max(lo, denom)
        assert 2**rb.upper * denom >= hi or rb.upper == 0
        assert rb.lower <= rb.upper
