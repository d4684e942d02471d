"""Deterministic curve construction via complex multiplication.

Pipeline: pick the smallest discriminant D with 4p = t^2 + D*s^2, decide
which of the orders p+1-t / p+1+t to aim for, extract a j-invariant from
the precomputed class polynomial mod p, synthesize the curve, and twist
when the first candidate lands on the wrong order of the pair.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from .counting import curve_order
from .curve import CurveParams, CurvePoint, OrderInfo, _raw_mul, _to_raw
from .numtheory import cornacchia, factorize, is_prime, legendre, sqrt_mod

__all__ = [
    "UnsupportedDiscriminant",
    "Restart",
    "CmConstructionError",
    "CMParams",
    "ClassPolyEntry",
    "CmResult",
    "class_number",
    "class_polynomial",
    "supported_discriminants",
    "find_discriminant",
    "roots_mod_p",
    "curve_from_j",
    "cm_generate",
]

PREFERENCES = ("prime", "near-prime", "larger", "smaller", "any")


class UnsupportedDiscriminant(LookupError):
    """Discriminant outside the shipped class-polynomial table."""


class Restart(RuntimeError):
    """This prime admits no acceptable curve; pick a new one."""


class CmConstructionError(RuntimeError):
    """The synthesized curve family never produced the predicted order."""


@dataclass(frozen=True)
class CMParams:
    """Solution of 4p = t^2 + D*s^2 with the class number of -D."""

    D: int
    t: int
    s: int
    class_number: int


@dataclass(frozen=True)
class ClassPolyEntry:
    """H_D(x) as integer coefficients, constant term first, monic."""

    D: int
    class_number: int
    coeffs: Tuple[int, ...]


@dataclass(frozen=True)
class CmResult:
    curve: CurveParams
    order: OrderInfo
    cm: CMParams
    j_invariant: int
    base_point: CurvePoint
    twist_order: int


def class_number(D: int) -> int:
    """Class number h(-D) by counting reduced primitive quadratic forms
    (a, b, c) with b^2 - 4ac = -D, |b| <= a <= c."""
    if D <= 0 or D % 4 not in (0, 3):
        raise ValueError("D must be positive and = 0 or 3 (mod 4)")
    count = 0
    b = D % 2
    while b * b <= D:
        m = b * b + D
        if m % 4 == 0:
            m //= 4
            a = max(b, 1)
            while a * a <= m:
                if m % a == 0:
                    c = m // a
                    if math.gcd(math.gcd(a, b), c) == 1:
                        count += 1
                        if 0 < b < a < c:
                            count += 1  # (a, -b, c) is a distinct reduced form
                a += 1
        b += 2
    return count


@lru_cache(maxsize=1)
def _load_table() -> Dict[int, ClassPolyEntry]:
    text = (
        resources.files("curvekit").joinpath("data/class_polynomials.txt").read_text()
    )
    table: Dict[int, ClassPolyEntry] = {}
    version_seen = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("version"):
            version_seen = True
            continue
        fields = line.split()
        D, h = int(fields[0]), int(fields[1])
        coeffs = tuple(int(c) for c in fields[2:])
        if len(coeffs) != h + 1 or coeffs[-1] != 1:
            raise ValueError(f"malformed class polynomial record for D = {D}")
        if D % 4 not in (0, 3):
            raise ValueError(f"D = {D} is not a valid discriminant")
        table[D] = ClassPolyEntry(D, h, coeffs)
    if not version_seen:
        raise ValueError("class polynomial table missing version line")
    return table


def supported_discriminants(max_class_number: Optional[int] = None) -> List[int]:
    """Shipped discriminants in ascending order, optionally capped by h."""
    table = _load_table()
    return sorted(
        D
        for D, entry in table.items()
        if max_class_number is None or entry.class_number <= max_class_number
    )


def class_polynomial(D: int) -> ClassPolyEntry:
    """Precomputed H_D, independent of p."""
    try:
        return _load_table()[D]
    except KeyError:
        raise UnsupportedDiscriminant(
            f"D = {D} not in the shipped table; add a record to the data file"
        ) from None


def find_discriminant(
    p: int,
    candidates: Optional[Sequence[int]] = None,
    max_class_number: Optional[int] = None,
) -> Optional[CMParams]:
    """First candidate discriminant representing 4p, with its (t, s).

    Candidates default to the shipped table in ascending order.  Returns
    None when no candidate admits a representation.
    """
    if candidates is None:
        candidates = supported_discriminants(max_class_number)
    table = _load_table()
    for D in candidates:
        solution = cornacchia(p, D)
        if solution is not None:
            t, s = solution
            h = table[D].class_number if D in table else class_number(D)
            return CMParams(D, t, s, h)
    return None


# ---------------------------------------------------------------------------
# polynomial root finding mod p
#
# Dense little-endian coefficient lists; [] is the zero polynomial.  The
# shipped table has degree <= 3, so clarity beats asymptotics here.


def _peval(f: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def _pstrip(f: List[int]) -> List[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmul(u: Sequence[int], v: Sequence[int], p: int) -> List[int]:
    if not u or not v:
        return []
    prod = [0] * (len(u) + len(v) - 1)
    for i, ui in enumerate(u):
        if ui:
            for j, vj in enumerate(v):
                prod[i + j] = (prod[i + j] + ui * vj) % p
    return _pstrip(prod)


def _pdivmod(u: Sequence[int], v: Sequence[int], p: int) -> Tuple[List[int], List[int]]:
    """Quotient and remainder of u by monic v."""
    assert v and v[-1] == 1
    r = list(u)
    q = [0] * max(0, len(r) - len(v) + 1)
    while len(r) >= len(v):
        if r[-1] == 0:
            r.pop()
            continue
        shift = len(r) - len(v)
        c = r[-1]
        q[shift] = c
        for j in range(len(v)):
            r[shift + j] = (r[shift + j] - c * v[j]) % p
    return _pstrip(q), _pstrip(r)


def _pmonic(f: Sequence[int], p: int) -> List[int]:
    g = _pstrip([c % p for c in f])
    if not g or g[-1] == 1:
        return g
    inv = pow(g[-1], -1, p)
    return [c * inv % p for c in g]


def _pgcd(u: Sequence[int], v: Sequence[int], p: int) -> List[int]:
    a, b = _pmonic(u, p), _pmonic(v, p)
    while b:
        _, r = _pdivmod(a, b, p)
        a, b = b, _pmonic(r, p)
    return a


def _ppowmod(base: Sequence[int], e: int, f: List[int], p: int) -> List[int]:
    result = [1]
    acc = _pdivmod([c % p for c in base], f, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, acc, p), f, p)[1]
        acc = _pdivmod(_pmul(acc, acc, p), f, p)[1]
        e >>= 1
    return result


def roots_mod_p(coeffs: Sequence[int], p: int) -> List[int]:
    """All roots of the integer polynomial mod p, ascending.

    Direct scan for small p; otherwise gcd with x^p - x isolates the
    distinct linear factors, which are separated by equal-degree splitting
    with shifted half-power gcds.
    """
    f = _pstrip([c % p for c in coeffs])
    if not f:
        raise ValueError("zero polynomial")
    if len(f) == 1:
        return []
    if p <= 4096:
        return [x for x in range(p) if _peval(f, x, p) == 0]

    f = _pmonic(f, p)
    xp = _ppowmod([0, 1], p, f, p)
    xp_minus_x = list(xp) + [0] * max(0, 2 - len(xp))
    xp_minus_x[1] = (xp_minus_x[1] - 1) % p
    g = _pgcd(xp_minus_x, f, p)

    roots: List[int] = []

    def split(poly: List[int]) -> None:
        deg = len(poly) - 1
        if deg <= 0:
            return
        if deg == 1:
            roots.append(-poly[0] % p)
            return
        for shift in range(1, 1 + 64 * deg):
            probe = _ppowmod([shift, 1], (p - 1) // 2, poly, p)
            probe = list(probe) + [0] * max(0, 1 - len(probe))
            probe[0] = (probe[0] - 1) % p
            d = _pgcd(probe, poly, p)
            if 0 < len(d) - 1 < deg:
                quot, _ = _pdivmod(poly, d, p)
                split(d)
                split(quot)
                return
        raise RuntimeError(f"equal-degree splitting failed mod {p}")

    split(g)
    return sorted(roots)


# ---------------------------------------------------------------------------
# curve synthesis


def curve_from_j(j0: int, p: int) -> CurveParams:
    """Curve with j-invariant j0: y^2 = x^3 + 3kx + 2k, k = j0/(1728 - j0).

    The formula degenerates at j0 = 0 and j0 = 1728; those return the
    family representatives x^3 + 1 and x^3 + x, whose right member is
    chosen by the caller's twist sweep.
    """
    if p <= 3:
        raise ValueError("p must exceed 3")
    j0 %= p
    if j0 == 0:
        return CurveParams(p, 0, 1)
    if j0 == 1728 % p:
        return CurveParams(p, 1, 0)
    k = j0 * pow((1728 - j0) % p, -1, p) % p
    return CurveParams(p, 3 * k % p, 2 * k % p)


def _select_order(
    p: int, t: int, prefer: str, cofactor_max: int
) -> Optional[Tuple[int, int, int]]:
    """Pick (N, n, h) among {p+1-t, p+1+t} per the preference, or None."""
    pair = (p + 1 - t, p + 1 + t)
    if prefer == "prime":
        for N in pair:
            if is_prime(N):
                return N, N, 1
        return None
    if prefer == "near-prime":
        for h in range(1, cofactor_max + 1):
            for N in pair:
                if N % h == 0 and is_prime(N // h):
                    return N, N // h, h
        return None
    if prefer in ("larger", "smaller", "any"):
        if prefer == "larger":
            N = max(pair)
        elif prefer == "smaller":
            N = min(pair)
        else:
            N = pair[0]
        n = max(factorize(N))
        return N, n, N // n
    raise ValueError(f"prefer must be one of {PREFERENCES}")


def _smallest_nonsquare(p: int) -> int:
    c = 2
    while legendre(c, p) != -1:
        c += 1
    return c


def _deterministic_base_point(E: CurveParams, N: int, n: int) -> CurvePoint:
    """Smallest-x point scaled down to exact order n.

    The group need not be cyclic, so take the first point whose own order
    is a multiple of n and divide the excess out."""
    N_factors = factorize(N)
    for x in range(min(E.p, 10_000)):
        rhs = E.rhs(x)
        if legendre(rhs, E.p) < 0:
            continue
        P = (x, sqrt_mod(rhs, E.p))
        order = N
        for q in N_factors:
            while order % q == 0 and _raw_mul(order // q, P, E.a, E.p) is None:
                order //= q
        if order % n == 0:
            G = _raw_mul(order // n, P, E.a, E.p)
            assert G is not None
            return CurvePoint(G[0], G[1])
    raise CmConstructionError("no base point of the requested order found")


def _sweep_family(
    p: int, coefficient: str, target: int, rng: Optional[random.Random]
) -> CurveParams:
    """Try twists of x^3 + b (j = 0) or x^3 + ax (j = 1728) until one has
    the target order.  Both families have finitely many twist classes, so
    a short sweep must hit every achievable order."""
    for value in range(1, min(p, 512)):
        E = (
            CurveParams(p, 0, value)
            if coefficient == "b"
            else CurveParams(p, value, 0)
        )
        if curve_order(E, rng) == target:
            return E
    raise CmConstructionError(
        f"no member of the {coefficient}-family over F_{p} has order {target}"
    )


def cm_generate(
    p: int,
    candidates: Optional[Sequence[int]] = None,
    prefer: str = "prime",
    max_class_number: Optional[int] = None,
    cofactor_max: int = 4,
    rng: Optional[random.Random] = None,
) -> CmResult:
    """Deterministic construction of a curve over F_p with known order.

    Finds the smallest usable CM discriminant, selects the preferred member
    of {p+1-t, p+1+t} ("prime", "near-prime" with cofactor <= cofactor_max,
    "larger", "smaller" or "any"), synthesizes the curve from a root of the
    class polynomial and corrects with a quadratic twist when needed.  The
    emitted order is verified by counting.  Raises Restart when this prime
    cannot satisfy the preference.
    """
    if prefer not in PREFERENCES:
        raise ValueError(f"prefer must be one of {PREFERENCES}")
    if not is_prime(p) or p <= 3:
        raise ValueError("p must be an odd prime greater than 3")

    cm = find_discriminant(p, candidates, max_class_number)
    if cm is None:
        raise Restart(f"no discriminant candidate represents 4*{p}")
    selection = _select_order(p, cm.t, prefer, cofactor_max)
    if selection is None:
        raise Restart(
            f"neither {p + 1 - cm.t} nor {p + 1 + cm.t} satisfies '{prefer}'"
        )
    N, n, h = selection

    entry = class_polynomial(cm.D)
    roots = roots_mod_p(entry.coeffs, p)
    if not roots:
        raise Restart(f"H_{cm.D} has no root mod {p}")

    chosen: Optional[CurveParams] = None
    j_used = roots[0]
    for j0 in roots:
        if j0 == 0:
            chosen = _sweep_family(p, "b", N, rng)
        elif j0 == 1728 % p:
            chosen = _sweep_family(p, "a", N, rng)
        else:
            E = curve_from_j(j0, p)
            got = curve_order(E, rng)
            if got == N:
                chosen = E
            elif got in (p + 1 - cm.t, p + 1 + cm.t):
                if rng is not None:
                    c = rng.randrange(2, p)
                    while legendre(c, p) != -1:
                        c = rng.randrange(2, p)
                else:
                    c = _smallest_nonsquare(p)
                twisted = E.twist(c)
                if curve_order(twisted, rng) != N:
                    raise CmConstructionError(
                        f"twist of j = {j0} curve missed the predicted order"
                    )
                chosen = twisted
            else:
                raise CmConstructionError(
                    f"j = {j0} curve order {got} outside {{p+1-t, p+1+t}}"
                )
        if chosen is not None:
            j_used = j0
            break
    assert chosen is not None

    order = OrderInfo(N=N, t=p + 1 - N, n=n, h=h)
    base = _deterministic_base_point(chosen, N, n)
    return CmResult(
        curve=chosen,
        order=order,
        cm=cm,
        j_invariant=j_used,
        base_point=base,
        twist_order=2 * p + 2 - N,
    )
