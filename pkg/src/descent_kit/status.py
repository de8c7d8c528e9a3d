"""Per-class descent outcomes and rank intervals shared by both descents."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union


@dataclass(frozen=True)
class ProvedIn:
    """The class is in the image.

    source is one of "torsion", "search", "closure"; point is the rational
    point (x, y) or None for infinity; solution is the homogeneous-space
    solution when the class came from a search.
    """

    source: str
    point: Optional[tuple] = None
    solution: Optional[tuple] = None


@dataclass(frozen=True)
class ProvedOut:
    """The class is outside the image.

    kind: "local" (no primitive solution modulo ``modulus``), "sign" (negative
    definite), "coset" (product of an excluded class and an image class),
    "index" (the image subgroup cannot be larger than the proved part) or
    "norm" (Eisenstein side: the norm is not a rational cube).
    """

    kind: str
    prime: Optional[int] = None
    modulus: Optional[int] = None


@dataclass(frozen=True)
class Unknown:
    reason: str = "not-found-within-bound"


Status = Union[ProvedIn, ProvedOut, Unknown]


@dataclass(frozen=True)
class ClassStatus:
    cls: Any
    status: Status

    @property
    def state(self) -> str:
        if isinstance(self.status, ProvedIn):
            return "in"
        if isinstance(self.status, ProvedOut):
            return "out"
        return "unknown"


@dataclass(frozen=True)
class RankBounds:
    lower: int
    upper: int
    # image sizes: proved lower bound and largest size still possible, per side
    image_lower: tuple[int, int]
    image_upper: tuple[int, int]
    undecided: int
    certificates: tuple[tuple[ClassStatus, ...], tuple[ClassStatus, ...]] = field(repr=False)

    def __post_init__(self):
        assert 0 <= self.lower <= self.upper, (self.lower, self.upper)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def floor_pow(n: int, base: int) -> int:
    """Largest power of base that is <= n (n >= 1)."""
    p = 1
    while p * base <= n:
        p *= base
    return p


def ilog(n: int, base: int) -> int:
    k = 0
    while n >= base:
        n //= base
        k += 1
    return k


def finish_statuses(classes, raw: dict, mul, identity, base: int) -> tuple[list[ClassStatus], int, int]:
    """Close the proved-in set under the group law and propagate exclusions.

    classes: all candidate classes (a finite group under ``mul``, all of
    exponent ``base``); raw: class -> Status from the per-class analysis.
    Returns (statuses in ``classes`` order, |in|, upper bound on |image|).
    """
    status = dict(raw)
    status[identity] = status.get(identity) if isinstance(status.get(identity), ProvedIn) else ProvedIn("torsion", None)
    universe = set(classes)

    changed = True
    while changed:
        changed = False
        ins = [c for c in classes if isinstance(status[c], ProvedIn)]
        for x in ins:
            for y in ins:
                z = mul(x, y)
                if z in universe and not isinstance(status[z], ProvedIn):
                    if isinstance(status[z], ProvedOut):
                        raise AssertionError(f"class {z} proved both in and out")
                    status[z] = ProvedIn("closure", None, (x, y))
                    changed = True
        ins = [c for c in classes if isinstance(status[c], ProvedIn)]
        outs = [c for c in classes if isinstance(status[c], ProvedOut)]
        for o in outs:
            for i in ins:
                z = mul(o, i)
                if z in universe and isinstance(status[z], Unknown):
                    status[z] = ProvedOut("coset")
                    changed = True

    n_in = sum(isinstance(status[c], ProvedIn) for c in classes)
    n_out = sum(isinstance(status[c], ProvedOut) for c in classes)
    # The image is a subgroup: its size is a power of base, at least n_in.
    upper = max(n_in, floor_pow(len(classes) - n_out, base))
    if upper == n_in:
        for c in classes:
            if isinstance(status[c], Unknown):
                status[c] = ProvedOut("index")
    return [ClassStatus(c, status[c]) for c in classes], n_in, upper
