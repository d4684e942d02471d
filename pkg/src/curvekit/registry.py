"""Built-in registry of standard curves with provenance metadata,
plus audit and approach-trend reporting.

Published orders are trusted but verified: recounting a 256-bit curve is
out of reach, so load time checks the scalar kill n*G, the cofactor
product and the Hasse bound instead, and audits mark anything that would
need infeasible computation as Indeterminate rather than passing it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .curve import CurveParams, CurvePoint, NotPrime, OrderInfo, Singular, new_curve
from .validator import Subject, ValidationReport, ValidatorPolicy, validate

__all__ = [
    "ParseError",
    "ConsistencyError",
    "UnknownCurve",
    "APPROACHES",
    "StandardCurveRecord",
    "AuditResult",
    "TrendReport",
    "load_registry",
    "builtin_registry",
    "find_record",
    "audit",
    "trend_report",
]

APPROACHES = ("deterministic", "pseudo-random", "random")

_HEX_FIELDS = ("p", "a", "b", "gx", "gy", "n")
_META_FIELDS = ("agency", "year", "security_bits", "approach", "source")


class ParseError(ValueError):
    """Registry file does not follow the documented record format."""


class ConsistencyError(ValueError):
    """A record's own parameters contradict each other."""


class UnknownCurve(KeyError):
    """Requested name matches no registry record."""


@dataclass(frozen=True)
class StandardCurveRecord:
    name: str
    aka: Tuple[str, ...]
    agency: str
    year: int
    security_bits: int
    approach: str
    curve: CurveParams
    order: OrderInfo
    base_point: CurvePoint
    source: str

    def subject(self) -> Subject:
        return Subject(self.curve, self.order, self.base_point)

    def matches(self, name: str) -> bool:
        wanted = name.lower()
        return self.name.lower() == wanted or wanted in (s.lower() for s in self.aka)


@dataclass(frozen=True)
class AuditResult:
    record: StandardCurveRecord
    report: ValidationReport


@dataclass(frozen=True)
class TrendReport:
    counts: Dict[str, int]
    total: int
    plurality: Optional[str]


def _build_record(name: str, fields: Dict[str, str], aka: Tuple[str, ...]):
    for key in _META_FIELDS + _HEX_FIELDS + ("h",):
        if key not in fields:
            raise ParseError(f"curve {name}: missing field {key!r}")
    if fields["approach"] not in APPROACHES:
        raise ParseError(f"curve {name}: unknown approach {fields['approach']!r}")
    try:
        numbers = {key: int(fields[key], 16) for key in _HEX_FIELDS}
        h = int(fields["h"])
        year = int(fields["year"])
        security_bits = int(fields["security_bits"])
    except ValueError as exc:
        raise ParseError(f"curve {name}: {exc}") from None

    try:
        curve = new_curve(numbers["p"], numbers["a"], numbers["b"])
    except (Singular, NotPrime) as exc:
        raise ConsistencyError(f"curve {name}: {exc}") from None
    G = CurvePoint(numbers["gx"], numbers["gy"])
    if not curve.contains(G):
        raise ConsistencyError(f"curve {name}: base point not on the curve")
    n = numbers["n"]
    N = n * h
    t = curve.p + 1 - N
    if t * t > 4 * curve.p:
        raise ConsistencyError(f"curve {name}: order violates the Hasse bound")
    if not curve.scalar_mul(n, G).infinity:
        raise ConsistencyError(f"curve {name}: n * G is not the identity")
    order = OrderInfo(N=N, t=t, n=n, h=h)
    return StandardCurveRecord(
        name=name,
        aka=aka,
        agency=fields["agency"],
        year=year,
        security_bits=security_bits,
        approach=fields["approach"],
        curve=curve,
        order=order,
        base_point=G,
        source=fields["source"],
    )


def load_registry(path: Optional[str] = None) -> Tuple[StandardCurveRecord, ...]:
    """Parse and verify a registry file; the shipped one by default.

    Raises ParseError for format problems and ConsistencyError when a
    record's parameters contradict each other.
    """
    if path is None:
        text = (
            resources.files("curvekit").joinpath("data/standard_curves.txt").read_text()
        )
    else:
        text = Path(path).read_text()

    records: List[StandardCurveRecord] = []
    name: Optional[str] = None
    aka: Tuple[str, ...] = ()
    fields: Dict[str, str] = {}
    version_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" ")
        value = value.strip()
        if key == "version":
            version_seen = True
        elif key == "curve":
            if name is not None:
                raise ParseError(f"line {lineno}: record {name!r} missing 'end'")
            name, aka, fields = value, (), {}
        elif key == "end":
            if name is None:
                raise ParseError(f"line {lineno}: 'end' outside a record")
            records.append(_build_record(name, fields, aka))
            name = None
        elif name is None:
            raise ParseError(f"line {lineno}: field {key!r} outside a record")
        elif key == "aka":
            aka = tuple(value.split())
        else:
            fields[key] = value
    if name is not None:
        raise ParseError(f"record {name!r} missing 'end'")
    if not version_seen:
        raise ParseError("registry file missing version line")
    return tuple(records)


@lru_cache(maxsize=1)
def builtin_registry() -> Tuple[StandardCurveRecord, ...]:
    return load_registry()


def find_record(
    name: str, registry: Optional[Sequence[StandardCurveRecord]] = None
) -> StandardCurveRecord:
    for record in registry if registry is not None else builtin_registry():
        if record.matches(name):
            return record
    raise UnknownCurve(name)


def audit(
    name: str,
    policy: Optional[ValidatorPolicy] = None,
    registry: Optional[Sequence[StandardCurveRecord]] = None,
    threads: int = 1,
) -> AuditResult:
    """Validate a registry curve against the criteria catalog using its
    published order."""
    policy = policy or ValidatorPolicy()
    if policy.embedding_bound < 20:
        raise ValueError("audit mode requires an embedding bound of at least 20")
    record = find_record(name, registry)
    return AuditResult(record, validate(record.subject(), policy, threads))


def trend_report(
    registry: Optional[Sequence[StandardCurveRecord]] = None,
) -> TrendReport:
    """Count records per computational approach; the shipped registry
    shows the deterministic approach as the plurality."""
    records = registry if registry is not None else builtin_registry()
    counts = {approach: 0 for approach in APPROACHES}
    for record in records:
        counts[record.approach] += 1
    plurality: Optional[str] = None
    if counts:
        best = max(counts.values())
        leaders = [label for label, c in counts.items() if c == best and best > 0]
        if len(leaders) == 1:
            plurality = leaders[0]
    return TrendReport(counts=counts, total=len(records), plurality=plurality)
