"""Certified bounds on q(n), q_G(n) and m_F(n).

Every upper bound is backed by a verified non-constant witness map and every
lower bound records the rules that produced it.
"""

from __future__ import annotations

import csv
import io
import json
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

from .hopf import chain_witness, clifford_hopf_map
from .sphere_maps import (
    SphereMap,
    identity_map,
    is_constant,
    restrict_nonconstant,
    verify_sphere_map,
)

__all__ = [
    "QBound",
    "wood_obstruction",
    "q_bounds",
    "q_group",
    "m_bound",
    "emit_table",
    "witness_map",
    "BASE_WITNESSES",
]


@dataclass(frozen=True)
class QBound:
    n: int
    lower: int
    upper: int
    witness: str | None = None
    provenance: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> int | None:
        return self.lower if self.exact else None

    def as_tuple(self) -> tuple:
        return (self.lower, self.upper, self.exact)


def wood_obstruction(n: int, r: int) -> bool:
    """True iff {r+1, ..., n} contains a power of two (no non-constant map S^n -> S^r)."""
    if not 1 <= r <= n - 1:
        raise ValueError(f"need 1 <= r <= n-1, got n={n}, r={r}")
    p = 1 << (n.bit_length() - 1)  # largest power of two <= n
    return p >= r + 1


# Named maps S^source -> S^target available as upper-bound witnesses.
BASE_WITNESSES = {
    "hopf_S3_S2": (3, 2, lambda: clifford_hopf_map(2)),
    "hopf_S7_S4": (7, 4, lambda: clifford_hopf_map(4)),
    "hopf_S15_S8": (15, 8, lambda: clifford_hopf_map(8)),
    "hopf_S24_S16": (24, 16, lambda: clifford_hopf_map(16)),
    "chain_S31_S16": (31, 16, lambda: chain_witness("S31_to_S16")),
    "hopf_S41_S32": (41, 32, lambda: clifford_hopf_map(32)),
    "chain_S47_S32": (47, 32, lambda: chain_witness("S47_to_S32")),
}

_lock = threading.Lock()
_witness_cache: dict = {}


def _choose_witness(n: int):
    """Smallest-target base witness with source >= n and target < n."""
    best = None
    for name, (src, tgt, _) in BASE_WITNESSES.items():
        if src >= n and tgt < n:
            key = (tgt, src)
            if best is None or key < best[0]:
                best = (key, name)
    return None if best is None else best[1]


def witness_id(n: int) -> str:
    base = _choose_witness(n)
    if base is None:
        return f"identity_S{n}"
    src = BASE_WITNESSES[base][0]
    return base if src == n else f"{base}|S{n}"


def witness_map(wid: str) -> SphereMap:
    """Build (and memoise) the witness named ``wid``; verified before being cached."""
    with _lock:
        if wid in _witness_cache:
            return _witness_cache[wid]
    if wid.startswith("identity_S"):
        F = identity_map(int(wid[len("identity_S"):]))
    else:
        base, _, restr = wid.partition("|S")
        if base not in BASE_WITNESSES:
            raise KeyError(f"unknown witness {wid!r}")
        F = BASE_WITNESSES[base][2]()
        if restr:
            F, _ = restrict_nonconstant(F, int(restr))
    report = verify_sphere_map(F)
    if not report.passed or is_constant(F):
        raise RuntimeError(f"witness {wid} failed verification")
    with _lock:
        _witness_cache[wid] = F
    return F


@lru_cache(maxsize=None)
def _lower(n: int) -> tuple:
    """Lower bound for q(n) with the rules attaining it."""
    if n == 1:
        return 1, ("identity",)
    # q(n) > r whenever Wood's obstruction applies to (n, r)
    wood = 1 + max((r for r in range(1, n) if wood_obstruction(n, r)), default=0)
    mono = _lower(n - 1)[0] if n > 2 else 1
    best = max(wood, mono)
    rules = [tag for tag, v in (("wood", wood), ("monotone", mono)) if v == best]
    if best % 2:
        best += 1
        rules.append("even")
    return best, tuple(rules)


def q_bounds(n: int, build_witness: bool = False) -> QBound:
    """Certified interval for q(n).

    The upper bound comes from a named witness (a base map restricted to a
    great S^n, or the identity); pass ``build_witness=True`` to construct and
    verify it before returning.
    """
    if n < 1:
        raise ValueError("q(n) is defined for n >= 1")
    lower, lrules = _lower(n)
    wid = witness_id(n)
    if wid.startswith("identity"):
        upper = n
        urules = ("identity",)
    else:
        upper = BASE_WITNESSES[wid.split("|")[0]][1]
        urules = ("witness",)
    if build_witness:
        F = witness_map(wid)
        assert F.target_dim == upper and F.source_dim == n
    return QBound(n, lower, upper, wid, tuple(lrules) + urules)


_GROUP_NAMES = ("SO", "U", "SU")


def _parse_group(group: str) -> tuple:
    if group in _GROUP_NAMES:
        return group, None
    for prefix in ("GrR", "GrC"):
        if group.startswith(prefix + "(") and group.endswith(")"):
            return prefix, int(group[len(prefix) + 1:-1])
    raise ValueError(f"unknown group {group!r}")


def q_group(n: int, group: str) -> QBound:
    """q_G(n) from q(n): SO -> 1+q, U/SU -> 1+q/2, GrR(k) -> 1+max(k,q), GrC(k) -> 1+max(k,q/2)."""
    if n < 2:
        raise ValueError("the group formulas need n >= 2")
    kind, k = _parse_group(group)
    qb = q_bounds(n)

    def f(q):
        if kind == "SO":
            return 1 + q
        if kind in ("U", "SU"):
            return 1 + q // 2
        if kind == "GrR":
            return 1 + max(k, q)
        return 1 + max(k, q // 2)

    return QBound(n, f(qb.lower), f(qb.upper), qb.witness, qb.provenance + (f"group:{group}",))


def _m_real(q: int) -> int:
    return (1 + isqrt(1 + 8 * q)) // 2


def m_bound(n: int, field: str = "R") -> tuple:
    """(low, high) for m_F(n); a point when q(n) is exact."""
    if n < 2:
        raise ValueError("m_F(n) is defined for n >= 2")
    qb = q_bounds(n)
    f = _m_real if field == "R" else isqrt
    if field not in ("R", "C"):
        raise ValueError("field must be 'R' or 'C'")
    return f(qb.lower), f(qb.upper)


def table_rows(max_n: int, verify: bool = False) -> list:
    if max_n < 2:
        raise ValueError("max_n must be at least 2")
    rows = []
    for n in range(2, max_n + 1):
        qb = q_bounds(n, build_witness=verify)
        so = q_group(n, "SO")
        u = q_group(n, "U")
        rows.append({
            "n": n,
            "q_lower": qb.lower,
            "q_upper": qb.upper,
            "exact": qb.exact,
            "witness_id": qb.witness,
            "provenance": list(qb.provenance),
            "q_SO": [so.lower, so.upper],
            "q_U": [u.lower, u.upper],
            "m_R": list(m_bound(n, "R")),
            "m_C": list(m_bound(n, "C")),
        })
    return rows


def _span(pair) -> str:
    lo, hi = pair
    return str(lo) if lo == hi else f"[{lo},{hi}]"


def emit_table(max_n: int, fmt: str = "text", verify: bool = False) -> str:
    """Render the bounds table as text, JSON or CSV (deterministic)."""
    rows = table_rows(max_n, verify=verify)
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "q_lower", "q_upper", "exact", "q_SO", "q_U", "m_R", "m_C", "witness_id", "provenance"])
        for r in rows:
            w.writerow([
                r["n"], r["q_lower"], r["q_upper"], r["exact"],
                _span(r["q_SO"]), _span(r["q_U"]), _span(r["m_R"]), _span(r["m_C"]),
                r["witness_id"], " ".join(r["provenance"]),
            ])
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"{'n':>3}  {'q(n)':>8}  {'q_SO':>8}  {'q_U':>8}  {'m_R':>6}  {'m_C':>6}  witness"]
    for r in rows:
        lines.append(
            f"{r['n']:>3}  {_span((r['q_lower'], r['q_upper'])):>8}  {_span(r['q_SO']):>8}  "
            f"{_span(r['q_U']):>8}  {_span(r['m_R']):>6}  {_span(r['m_C']):>6}  {r['witness_id']}"
        )
    return "\n".join(lines) + "\n"
