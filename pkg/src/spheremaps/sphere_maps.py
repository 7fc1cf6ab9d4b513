"""Polynomial maps from spheres into spheres, matrix groups and Grassmannians."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .poly_core import (
    GaussianRational,
    MultiPoly,
    SphereContext,
    format_coeff,
    nf_reduce,
    parse_coeff,
    poly_from_json,
    poly_to_json,
    sum_of_products,
    sum_of_squares,
)

__all__ = [
    "SphereMap",
    "MatrixPolyMap",
    "ProjectorMap",
    "Report",
    "verify_sphere_map",
    "verify_matrix_map",
    "verify_projector_map",
    "is_constant",
    "compose",
    "identity_map",
    "constant_map",
    "equatorial_inclusion",
    "restrict_to_great_sphere",
    "restrict_nonconstant",
    "reflection_map",
    "column_map",
    "grassmannian_projector_map",
    "poly_matrix_det",
    "maps_equal",
]


@dataclass
class Report:
    """Outcome of a verification: ``passed`` plus the offending residuals."""

    passed: bool
    residuals: dict = field(default_factory=dict)
    det: MultiPoly | None = None
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {
            "passed": self.passed,
            "residuals": {k: poly_to_json(v) for k, v in self.residuals.items()},
            "notes": list(self.notes),
        }
        if self.det is not None:
            out["det"] = poly_to_json(self.det)
        return out


@dataclass(frozen=True, eq=False)
class SphereMap:
    """A polynomial map S^n -> S^r given by r+1 polynomials in n+1 variables."""

    source_dim: int
    target_dim: int
    coords: tuple

    def __post_init__(self):
        if self.source_dim < 1:
            raise ValueError("source dimension must be at least 1")
        if self.target_dim < 0:
            raise ValueError("target dimension must be non-negative")
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) != self.target_dim + 1:
            raise ValueError(
                f"S^{self.target_dim} needs {self.target_dim + 1} coordinates, got {len(self.coords)}"
            )
        for c in self.coords:
            if c.nvars != self.source_dim + 1:
                raise ValueError(
                    f"coordinate has {c.nvars} variables, expected {self.source_dim + 1}"
                )

    @property
    def ctx(self) -> SphereContext:
        return SphereContext(self.source_dim + 1)

    @property
    def degree_repr(self) -> int:
        return max(c.degree() for c in self.coords)

    def evaluate(self, point) -> tuple:
        return tuple(c.evaluate(point) for c in self.coords)

    def normal_form(self) -> "SphereMap":
        ctx = self.ctx
        return SphereMap(self.source_dim, self.target_dim, [nf_reduce(c, ctx) for c in self.coords])

    def __eq__(self, other):
        if not isinstance(other, SphereMap):
            return NotImplemented
        return maps_equal(self, other)

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "source_dim": self.source_dim,
            "target_dim": self.target_dim,
            "coords": [poly_to_json(c) for c in self.coords],
        }

    @classmethod
    def from_json(cls, obj) -> "SphereMap":
        try:
            return cls(
                int(obj["source_dim"]),
                int(obj["target_dim"]),
                [poly_from_json(c) for c in obj["coords"]],
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed sphere map JSON: {exc}") from exc


GROUPS = ("SO", "O", "U", "SU")


@dataclass(frozen=True)
class MatrixPolyMap:
    """An r x r matrix of polynomials on S^n, meant to land in ``group``."""

    source_dim: int
    size: int
    entries: tuple
    group: str = "SO"

    def __post_init__(self):
        if self.group not in GROUPS:
            raise ValueError(f"unknown group tag {self.group!r}")
        rows = tuple(tuple(r) for r in self.entries)
        if len(rows) != self.size or any(len(r) != self.size for r in rows):
            raise ValueError(f"entries must form a {self.size}x{self.size} matrix")
        for r in rows:
            for e in r:
                if e.nvars != self.source_dim + 1:
                    raise ValueError("matrix entry has the wrong number of variables")
        object.__setattr__(self, "entries", rows)

    @property
    def complex(self) -> bool:
        return self.group in ("U", "SU")

    @property
    def ctx(self) -> SphereContext:
        return SphereContext(self.source_dim + 1)

    @property
    def degree_repr(self) -> int:
        return max(e.degree() for r in self.entries for e in r)

    def evaluate(self, point) -> list:
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def to_json(self) -> dict:
        return {
            "source_dim": self.source_dim,
            "size": self.size,
            "group": self.group,
            "entries": [[poly_to_json(e) for e in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj) -> "MatrixPolyMap":
        try:
            size = int(obj["size"])
            raw = obj["entries"]
            if raw and not isinstance(raw[0], list):
                raw = [raw[i * size:(i + 1) * size] for i in range(size)]
            return cls(
                int(obj["source_dim"]),
                size,
                [[poly_from_json(e) for e in row] for row in raw],
                obj.get("group", "SO"),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed matrix map JSON: {exc}") from exc


@dataclass(frozen=True)
class ProjectorMap:
    """A map S^n -> Gr(k, r) stored as an r x r projection-valued polynomial matrix."""

    source_dim: int
    ambient: int
    rank: int
    entries: tuple
    complex: bool = False

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(r) for r in self.entries))
        if len(self.entries) != self.ambient or any(len(r) != self.ambient for r in self.entries):
            raise ValueError("projector matrix has the wrong size")

    @property
    def ctx(self) -> SphereContext:
        return SphereContext(self.source_dim + 1)

    @property
    def degree_repr(self) -> int:
        return max(e.degree() for r in self.entries for e in r)

    def to_json(self) -> dict:
        return {
            "source_dim": self.source_dim,
            "ambient": self.ambient,
            "rank": self.rank,
            "complex": self.complex,
            "entries": [[poly_to_json(e) for e in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj) -> "ProjectorMap":
        try:
            return cls(
                int(obj["source_dim"]),
                int(obj["ambient"]),
                int(obj["rank"]),
                [[poly_from_json(e) for e in row] for row in obj["entries"]],
                bool(obj.get("complex", False)),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed projector map JSON: {exc}") from exc


# verification


def verify_sphere_map(F: SphereMap) -> Report:
    """Check sum F_i^2 == 1 modulo the source sphere ideal."""
    n = F.source_dim + 1
    for c in F.coords:
        if c.nvars != n:
            raise ValueError("coordinate variable count does not match the source sphere")
    if any(c.is_complex() for c in F.coords):
        total = sum_of_products(((c, c.conjugate()) for c in F.coords), n, constant=-1)
    else:
        total = sum_of_squares(F.coords, n, constant=-1)
    residual = nf_reduce(total, F.ctx)
    if residual.is_zero():
        return Report(True)
    return Report(False, {"norm": residual})


def _is_constant_polys(polys, ctx) -> bool:
    return all(nf_reduce(p, ctx).degree() <= 0 for p in polys)


def is_constant(F) -> bool:
    """True iff every coordinate/entry reduces to a constant on the sphere."""
    if isinstance(F, SphereMap):
        return _is_constant_polys(F.coords, F.ctx)
    if isinstance(F, (MatrixPolyMap, ProjectorMap)):
        return _is_constant_polys((e for row in F.entries for e in row), F.ctx)
    raise TypeError(f"cannot decide constancy of {type(F).__name__}")


def maps_equal(F: SphereMap, G: SphereMap) -> bool:
    if (F.source_dim, F.target_dim) != (G.source_dim, G.target_dim):
        return False
    ctx = F.ctx
    return all(nf_reduce(a - b, ctx).is_zero() for a, b in zip(F.coords, G.coords))


def identity_map(n: int) -> SphereMap:
    return SphereMap(n, n, MultiPoly.variables(n + 1))


def constant_map(n: int, r: int, point: Sequence | None = None) -> SphereMap:
    point = point if point is not None else [1] + [0] * r
    return SphereMap(n, r, [MultiPoly.constant(n + 1, c) for c in point])


def compose(F: SphereMap, G: SphereMap) -> SphereMap:
    """G o F : S^n -> S^m -> S^r."""
    if F.target_dim != G.source_dim:
        raise ValueError(
            f"cannot compose S^{F.source_dim}->S^{F.target_dim} with S^{G.source_dim}->S^{G.target_dim}"
        )
    return SphereMap(F.source_dim, G.target_dim, [g.substitute(F.coords) for g in G.coords])


def equatorial_inclusion(n: int) -> SphereMap:
    """S^n -> S^{n+1}, v -> (v, 0)."""
    vs = MultiPoly.variables(n + 1)
    return SphereMap(n, n + 1, vs + [MultiPoly.zero(n + 1)])


def include_map(F: SphereMap) -> SphereMap:
    """Post-compose F with the equatorial inclusion of its target."""
    return SphereMap(F.source_dim, F.target_dim + 1, list(F.coords) + [MultiPoly.zero(F.source_dim + 1)])


def restrict_to_great_sphere(F: SphereMap, i: int) -> SphereMap:
    """Restrict to the great sphere {v_i = 0} (1-based ``i``), reindexing the rest."""
    n = F.source_dim
    if n < 1 or not 1 <= i <= n + 1:
        raise IndexError(f"great-sphere index {i} out of range for S^{n}")
    if n == 1:
        raise ValueError("cannot restrict a map on S^1 to a great S^0")
    keep = [j for j in range(n + 1) if j != i - 1]
    coords = [c.set_variable(i - 1, 0).select_variables(keep) for c in F.coords]
    return SphereMap(n - 1, F.target_dim, coords)


def restrict_nonconstant(F: SphereMap, n: int) -> tuple:
    """Restrict F to a coordinate great S^n on which it is still non-constant.

    Drops one coordinate at a time, trying the highest index first.  Returns
    (map, dropped indices as 1-based positions in the original source).
    """
    if n > F.source_dim:
        raise ValueError("cannot restrict to a larger sphere")
    current, labels, dropped = F, list(range(1, F.source_dim + 2)), []
    while current.source_dim > n:
        for i in range(current.source_dim + 1, 0, -1):
            cand = restrict_to_great_sphere(current, i)
            if not is_constant(cand):
                dropped.append(labels.pop(i - 1))
                current = cand
                break
        else:
            raise ValueError(f"no coordinate great sphere keeps the map non-constant at S^{current.source_dim - 1}")
    return current, sorted(dropped)


# matrix-valued maps


def poly_matrix_det(entries, ctx: SphereContext) -> MultiPoly:
    """Determinant, reduced modulo the sphere ideal after every step.

    Laplace expansion along rows with memoised minors over column subsets.
    """
    rows = [list(r) for r in entries]
    size = len(rows)
    nv = ctx.nvars
    memo = {}

    def minor(row: int, cols: tuple):
        if row == size:
            return MultiPoly.constant(nv, 1)
        if cols in memo:
            return memo[cols]
        acc = MultiPoly.zero(nv)
        for pos, c in enumerate(cols):
            e = rows[row][c]
            if e.is_zero():
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            term = e * sub
            acc = acc - term if pos % 2 else acc + term
        acc = nf_reduce(acc, ctx)
        memo[cols] = acc
        return acc

    return minor(0, tuple(range(size)))


def _gram_residual(entries, ctx, complex_: bool) -> dict:
    """Entries of M^T M - I (or M^* M - I) that do not vanish on the sphere."""
    size = len(entries)
    nv = ctx.nvars
    cols = [[entries[i][j] for i in range(size)] for j in range(size)]
    bad = {}
    for a in range(size):
        left = [c.conjugate() for c in cols[a]] if complex_ else cols[a]
        for b in range(a, size):
            val = sum_of_products(zip(left, cols[b]), nv, constant=-1 if a == b else 0)
            val = nf_reduce(val, ctx)
            if not val.is_zero():
                bad[f"gram[{a},{b}]"] = val
    return bad


def verify_matrix_map(M: MatrixPolyMap) -> Report:
    """Orthogonality/unitarity modulo the ideal, plus the determinant as an NF polynomial."""
    ctx = M.ctx
    residuals = _gram_residual(M.entries, ctx, M.complex)
    det = poly_matrix_det(M.entries, ctx)
    notes = []
    if M.group in ("SO", "SU"):
        if not (det - 1).is_zero():
            residuals["det"] = det - 1
    elif not det.is_constant():
        notes.append("determinant is not constant on the sphere")
        residuals["det"] = det - det.constant_term()
    return Report(not residuals, residuals, det=det, notes=notes)


def verify_projector_map(P: ProjectorMap) -> Report:
    """P^2 == P, P symmetric/Hermitian, trace P == rank, all modulo the ideal."""
    ctx = P.ctx
    E = P.entries
    r = P.ambient
    nv = ctx.nvars
    residuals = {}
    for i in range(r):
        for j in range(r):
            sq = sum_of_products(((E[i][k], E[k][j]) for k in range(r)), nv)
            d = nf_reduce(sq - E[i][j], ctx)
            if not d.is_zero():
                residuals[f"idempotent[{i},{j}]"] = d
            t = E[j][i].conjugate() if P.complex else E[j][i]
            d = nf_reduce(E[i][j] - t, ctx)
            if not d.is_zero():
                residuals[f"symmetric[{i},{j}]"] = d
    tr = MultiPoly.zero(nv)
    for i in range(r):
        tr = tr + E[i][i]
    d = nf_reduce(tr - P.rank, ctx)
    if not d.is_zero():
        residuals["trace"] = d
    return Report(not residuals, residuals)


def reflection_map(r: int, field: str = "R") -> MatrixPolyMap:
    """v -> (-1)^r (2 pi_v - 1), made special by a constant correction.

    Real: S^r -> SO(r+1).  Complex: S^{2r+1} -> SU(r+1) with z_j = v_{2j+1} + i v_{2j+2}.
    For odd r the raw matrix has determinant -1; the first row is negated
    (a constant isometry) so the determinant is 1.
    """
    if r < 1:
        raise ValueError("reflection maps need r >= 1")
    if field not in ("R", "C"):
        raise ValueError("field must be 'R' or 'C'")
    size = r + 1
    sign = -1 if r % 2 else 1
    if field == "R":
        nv = r + 1
        z = MultiPoly.variables(nv)
        zbar = z
    else:
        nv = 2 * r + 2
        vs = MultiPoly.variables(nv)
        i_ = GaussianRational(0, 1)
        z = [vs[2 * j] + vs[2 * j + 1] * i_ for j in range(size)]
        zbar = [c.conjugate() for c in z]
    rows = []
    for a in range(size):
        row = []
        for b in range(size):
            e = z[a] * zbar[b] * 2
            if a == b:
                e = e - 1
            row.append(e * sign)
        rows.append(row)
    if r % 2:
        rows[0] = [-e for e in rows[0]]
    group = "SO" if field == "R" else "SU"
    return MatrixPolyMap(nv - 1, size, rows, group)


def column_map(M: MatrixPolyMap, j: int) -> SphereMap:
    """Column j (1-based) as a sphere map; complex columns are realified (re, im interleaved)."""
    if not 1 <= j <= M.size:
        raise IndexError(f"column {j} out of range 1..{M.size}")
    col = [M.entries[i][j - 1] for i in range(M.size)]
    if M.complex or any(c.is_complex() for c in col):
        coords = []
        for c in col:
            coords.extend([c.real_part(), c.imag_part()])
        return SphereMap(M.source_dim, 2 * M.size - 1, coords)
    return SphereMap(M.source_dim, M.size - 1, col)


def grassmannian_projector_map(F: SphereMap, ambient: int, complement: bool = False) -> ProjectorMap:
    """Projection onto the line spanned by F(v), padded into R^ambient.

    With ``complement=True`` returns the projection onto F(v)^perp instead
    (rank ambient - 1), the map S^k -> Gr(k, k+1) when ambient = k+1.
    """
    k1 = F.target_dim + 1
    if k1 > ambient:
        raise ValueError(f"target S^{F.target_dim} does not fit in R^{ambient}")
    nv = F.source_dim + 1
    f = list(F.coords) + [MultiPoly.zero(nv)] * (ambient - k1)
    cplx = any(c.is_complex() for c in f)
    fbar = [c.conjugate() for c in f] if cplx else f
    rows = []
    for a in range(ambient):
        row = []
        for b in range(ambient):
            e = f[a] * fbar[b]
            if complement:
                e = (1 if a == b else 0) - e
            row.append(e)
        rows.append(row)
    rank = ambient - 1 if complement else 1
    return ProjectorMap(F.source_dim, ambient, rank, rows, cplx)


def matrix_to_json(m) -> list:
    return [[format_coeff(x) for x in row] for row in m]


def matrix_from_json(rows) -> list:
    return [[parse_coeff(x) for x in row] for row in rows]
