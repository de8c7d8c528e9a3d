"""Report records for the CLI: building, canonical JSON, flat CSV rows."""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from . import __version__
from .cuboid import CubeCase, classify_curve, cube_case_group, eval_coeffs, to_fraction, to_weierstrass
from .eisenstein import EisClass, EisInt
from .errors import DegenerateParameters, DescentError, DomainError, FactorizationIncomplete, SingularCurveError
from .status import ClassStatus, ProvedIn, ProvedOut, RankBounds, Unknown
from .three_descent import EIS_SEARCH_BOUND, make_e_pair, rank_bounds_3
from .two_descent import ker_index, make_td_pair, rank_bounds_2, two_torsion_count
from .weierstrass import Point, make_curve, sort_points, torsion_subgroup


@dataclass(frozen=True)
class Bounds:
    search_bound: int = 200
    local_bound: int | None = None  # None: each engine's own default
    eis_search_bound: int = EIS_SEARCH_BOUND

    def local(self, default: int) -> int:
        return default if self.local_bound is None else self.local_bound


# -- rendering -----------------------------------------------------------------

def rat(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def render(v: Any) -> Any:
    if isinstance(v, bool) or v is None or isinstance(v, (str, int)):
        return v
    if isinstance(v, Fraction):
        return rat(v)
    if isinstance(v, Point):
        return "infinity" if v.is_infinity else [rat(v.x), rat(v.y)]
    if isinstance(v, EisInt):
        return [v.u, v.v]
    if isinstance(v, EisClass):
        return {"eta": render(v.eta), "A": render(v.A), "B": render(v.B)}
    if isinstance(v, dict):
        return {str(k): render(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [render(x) for x in v]
    raise TypeError(f"cannot render {type(v).__name__}")


def render_point(coords) -> Any:
    return "infinity" if coords is None else [rat(coords[0]), rat(coords[1])]


def render_class(cls) -> Any:
    if isinstance(cls, tuple):
        return {"A": cls[0], "B": cls[1]}
    return render(cls)


def render_status(cs: ClassStatus) -> dict:
    st = cs.status
    out: dict[str, Any] = {"class": render_class(cs.cls), "state": cs.state}
    if isinstance(st, ProvedIn):
        out["source"] = st.source
        if st.source == "closure":
            # a product of proved classes; no single witness point is computed
            out["factors"] = [render_class(c) for c in st.solution]
        else:
            out["point"] = render_point(st.point)
            if st.solution is not None:
                out["solution"] = render(list(st.solution))
    elif isinstance(st, ProvedOut):
        out["kind"] = st.kind
        if st.modulus is not None:
            out["prime"], out["modulus"] = st.prime, st.modulus
    elif isinstance(st, Unknown):
        out["reason"] = st.reason
    return out


def render_rank(rb: RankBounds) -> dict:
    return {
        "lower": rb.lower,
        "upper": rb.upper,
        "image_lower": list(rb.image_lower),
        "image_upper": list(rb.image_upper),
        "undecided": rb.undecided,
    }


def curve_dict(E) -> dict:
    return {"a": rat(E.a), "b": rat(E.b)}


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def from_json(text: str) -> dict:
    return json.loads(text)


# -- builders ------------------------------------------------------------------

def _base(command: str, inputs: dict, bounds: Bounds) -> dict:
    return {
        "command": command,
        "input": inputs,
        "params": {
            "search_bound": bounds.search_bound,
            "local_bound": bounds.local_bound,
            "eis_search_bound": bounds.eis_search_bound,
        },
        "version": __version__,
    }


def _finish(rep: dict, rb: RankBounds | None) -> dict:
    if rb is not None:
        rep["rank"] = render_rank(rb)
        rep["status"] = "ok" if rb.undecided == 0 else "incomplete"
    else:
        rep.setdefault("status", "ok")
    return rep


def error_report(command: str, inputs: dict, bounds: Bounds, exc: Exception) -> dict:
    rep = _base(command, inputs, bounds)
    if isinstance(exc, DegenerateParameters):
        kind = "degenerate"
    elif isinstance(exc, FactorizationIncomplete):
        kind = "factorization-incomplete"
    elif isinstance(exc, (DomainError, SingularCurveError, ValueError)):
        kind = "invalid"
    else:
        kind = "error"
    rep["status"] = "error"
    rep["error"] = {"type": kind, "message": str(exc)}
    return rep


def two_descent_body(a: int, c: int, bounds: Bounds) -> tuple[dict, RankBounds]:
    from .two_descent import LOCAL_BOUND

    pair = make_td_pair(a, c)
    rb = rank_bounds_2(pair, bounds.search_bound, bounds.local(LOCAL_BOUND))
    body = {
        "method": "two-descent",
        "curve": curve_dict(pair.E),
        "assoc_curve": curve_dict(pair.Etilde),
        "torsion": render(torsion_subgroup(pair.E)),
        "ker_index": ker_index(pair),
        "two_torsion": two_torsion_count(pair),
        "classes": {
            "E": [render_status(s) for s in rb.certificates[0]],
            "Etilde": [render_status(s) for s in rb.certificates[1]],
        },
    }
    return body, rb


def three_descent_body(e: int, bounds: Bounds) -> tuple[dict, RankBounds]:
    from .three_descent import LOCAL_BOUND

    pair = make_e_pair(e)
    rb = rank_bounds_3(pair, bounds.search_bound, bounds.local(LOCAL_BOUND), bounds.eis_search_bound)
    body = {
        "method": "three-descent",
        "curve": curve_dict(pair.E),
        "assoc_curve": curve_dict(pair.Etilde),
        "torsion": render(torsion_subgroup(pair.E)),
        "assoc_torsion": render(torsion_subgroup(pair.Etilde)),
        "classes": {
            "E": [render_status(s) for s in rb.certificates[0]],
            "Etilde": [render_status(s) for s in rb.certificates[1]],
        },
    }
    return body, rb


def _timed(fn):
    def wrapper(*args, timing: bool = False, **kw):
        t0 = time.perf_counter()
        rep = fn(*args, **kw)
        if timing:
            rep["timing_s"] = round(time.perf_counter() - t0, 6)
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def cmd_curve_two(a: int, c: int, bounds: Bounds = Bounds()) -> dict:
    inputs = {"a": int(a), "c": int(c)}
    try:
        body, rb = two_descent_body(int(a), int(c), bounds)
    except DescentError as exc:
        return error_report("curve-two", inputs, bounds, exc)
    rep = _base("curve-two", inputs, bounds)
    rep.update(body)
    return _finish(rep, rb)


@_timed
def cmd_curve_three(e: int, bounds: Bounds = Bounds()) -> dict:
    inputs = {"e": int(e)}
    try:
        body, rb = three_descent_body(int(e), bounds)
    except DescentError as exc:
        return error_report("curve-three", inputs, bounds, exc)
    rep = _base("curve-three", inputs, bounds)
    rep.update(body)
    return _finish(rep, rb)


@_timed
def cmd_curve_torsion(a: int, b: int, bounds: Bounds = Bounds()) -> dict:
    inputs = {"a": int(a), "b": int(b)}
    try:
        E = make_curve(int(a), int(b))
        pts = torsion_subgroup(E)
    except DescentError as exc:
        return error_report("curve-torsion", inputs, bounds, exc)
    rep = _base("curve-torsion", inputs, bounds)
    rep.update({"method": "torsion", "curve": curve_dict(E), "torsion": render(pts), "order": len(pts)})
    return _finish(rep, None)


def _scale(P: Point, u: int, E) -> Point:
    if P.is_infinity:
        return E.infinity
    return E.point(P.x * u * u, P.y * u**3)


@_timed
def cmd_cuboid(b, c, family: str = "p1", bounds: Bounds = Bounds()) -> dict:
    b, c = Fraction(b), Fraction(c)
    inputs = {"b": rat(b), "c": rat(c), "family": family}
    try:
        if family not in ("p1", "p2"):
            raise DomainError(f"family must be p1 or p2, not {family!r}")
        co = eval_coeffs(b, c)
        N, R = to_fraction(co.P1 if family == "p1" else co.P2)
        E = to_weierstrass(N, R)
        cl = classify_curve(N, R)
        rep = _base("cuboid", inputs, bounds)
        rep.update({
            "coefficients": {"F": rat(co.F), "P1": rat(co.P1), "P2": rat(co.P2)},
            "N": N,
            "R": R,
            "curve": curve_dict(E),
        })
        if isinstance(cl, CubeCase):
            group = cube_case_group(cl.M)
            rep.update({
                "classification": {"case": "cube", "M": cl.M},
                "method": "cube-case",
                "torsion": render(sort_points(group)),
            })
            rep["rank"] = {"lower": 0, "upper": 0, "image_lower": [], "image_upper": [], "undecided": 0}
            rep["status"] = "ok"
            return rep
        body, rb = three_descent_body(cl.e, bounds)
        # torsion of the reduced curve, carried back by (x, y) -> (u^2 x, u^3 y)
        pair = make_e_pair(cl.e)
        tors = sort_points(_scale(P, cl.u, E) for P in torsion_subgroup(pair.E))
        rep.update({
            "classification": {"case": "general", "e": cl.e, "u": cl.u},
            "method": "three-descent",
            "torsion": render(tors),
            "reduced": body,
        })
        return _finish(rep, rb)
    except DescentError as exc:
        return error_report("cuboid", inputs, bounds, exc)


# -- CSV -----------------------------------------------------------------------

CSV_FIELDS = (
    "command", "b", "c", "family", "a", "e", "N", "R", "case", "method",
    "curve_a", "curve_b", "torsion_order", "rank_lower", "rank_upper", "undecided", "status", "error",
)


def csv_row(rep: dict) -> dict:
    inp = rep.get("input", {})
    cls = rep.get("classification", {})
    rank = rep.get("rank", {})
    row = {
        "command": rep["command"],
        "b": inp.get("b", ""),
        "c": inp.get("c", ""),
        "family": inp.get("family", ""),
        "a": inp.get("a", ""),
        "e": cls.get("e", inp.get("e", "")),
        "N": rep.get("N", ""),
        "R": rep.get("R", ""),
        "case": cls.get("case", ""),
        "method": rep.get("method", ""),
        "curve_a": rep.get("curve", {}).get("a", ""),
        "curve_b": rep.get("curve", {}).get("b", ""),
        "torsion_order": len(rep["torsion"]) if "torsion" in rep else "",
        "rank_lower": rank.get("lower", ""),
        "rank_upper": rank.get("upper", ""),
        "undecided": rank.get("undecided", ""),
        "status": rep["status"],
        "error": rep.get("error", {}).get("type", ""),
    }
    return row


def to_csv(reports, header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    if header:
        w.writeheader()
    for rep in reports:
        w.writerow(csv_row(rep))
    return buf.getvalue()


def schema() -> dict:
    """The JSON schema every report validates against."""
    from importlib import resources

    return json.loads(resources.files("descent_kit.data").joinpath("report.schema.json").read_text())
