"""Exterior algebra of R^{2n}, Hodge star, self-dual splitting and the intertwiner p.

Orthonormal bases of Lambda^+ and Lambda^- carry a factor 1/sqrt(2).  To keep
everything rational we store the vectors beta = sqrt(2) alpha (norm^2 = 2) and
express linear maps in the alpha bases through <A beta_I, beta_J> / 2, which
is exact.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

from . import linalg
from .poly_core import GaussianRational, MultiPoly, conj
from .sphere_maps import MatrixPolyMap, SphereMap, column_map

__all__ = [
    "HodgeContext",
    "ExtElement",
    "SelfDualSplit",
    "LaurentChar",
    "hodge_star",
    "sd_split",
    "intertwiner_p",
    "intertwiner_map",
    "exterior_power",
    "restrict_to_split",
    "verify_p_equivariance",
    "rational_rotation",
    "extract_fiber_map",
    "u1_char_exterior",
    "sd_characters",
]

_I = GaussianRational(0, 1)


def _perm_sign(first: tuple, second: tuple) -> int:
    inv = sum(1 for a in first for b in second if a > b)
    return -1 if inv % 2 else 1


@dataclass(frozen=True)
class HodgeContext:
    """R^dim with the Euclidean metric and orientation e_1 ^ ... ^ e_dim."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    @property
    def n(self) -> int:
        return self.dim // 2

    @property
    def complex(self) -> bool:
        """Middle-degree star squares to -1 (n odd), so Lambda^+- live over C."""
        return self.dim % 2 == 0 and self.n % 2 == 1

    def basis(self, k: int) -> list:
        """Increasing k-tuples of 0-based indices, lexicographic."""
        return list(itertools.combinations(range(self.dim), k))

    def vector(self, coords) -> "ExtElement":
        if len(coords) != self.dim:
            raise ValueError(f"need {self.dim} coordinates")
        return ExtElement(self, 1, {(i,): c for i, c in enumerate(coords) if _nonzero(c)})

    def e(self, *indices: int) -> "ExtElement":
        """e_{i1} ^ ... ^ e_{ik} from 1-based indices."""
        idx = [i - 1 for i in indices]
        if any(not 0 <= i < self.dim for i in idx):
            raise IndexError("basis index out of range")
        if len(set(idx)) != len(idx):
            return ExtElement(self, len(idx), {})
        order = sorted(range(len(idx)), key=lambda a: idx[a])
        inv = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
        return ExtElement(self, len(idx), {tuple(idx[a] for a in order): -1 if inv % 2 else 1})


def _nonzero(c) -> bool:
    if isinstance(c, MultiPoly):
        return not c.is_zero()
    return bool(c)


class ExtElement:
    """A homogeneous element of Lambda^k R^dim with coefficients in any commutative ring."""

    __slots__ = ("ctx", "grade", "coeffs")

    def __init__(self, ctx: HodgeContext, grade: int, coeffs: dict | None = None):
        if not 0 <= grade <= ctx.dim:
            raise ValueError(f"grade {grade} out of range for dimension {ctx.dim}")
        self.ctx = ctx
        self.grade = grade
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if _nonzero(c)}
        for k in self.coeffs:
            if len(k) != grade:
                raise ValueError(f"basis element {k} has the wrong grade")

    def vector(self) -> list:
        """Coefficients over the lexicographic basis (0 where absent)."""
        return [self.coeffs.get(b, 0) for b in self.ctx.basis(self.grade)]

    def _same(self, other):
        if not isinstance(other, ExtElement) or other.ctx != self.ctx or other.grade != self.grade:
            raise ValueError("elements live in different spaces")

    def __add__(self, other):
        self._same(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return ExtElement(self.ctx, self.grade, out)

    def __neg__(self):
        return ExtElement(self.ctx, self.grade, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExtElement":
        return ExtElement(self.ctx, self.grade, {k: v * c for k, v in self.coeffs.items()})

    __mul__ = scale
    __rmul__ = scale

    def wedge(self, other: "ExtElement") -> "ExtElement":
        if other.ctx != self.ctx:
            raise ValueError("elements live in different spaces")
        g = self.grade + other.grade
        if g > self.ctx.dim:
            return ExtElement(self.ctx, min(g, self.ctx.dim), {})
        out: dict = {}
        for a, ca in self.coeffs.items():
            sa = set(a)
            for b, cb in other.coeffs.items():
                if sa.intersection(b):
                    continue
                key = tuple(sorted(a + b))
                term = ca * cb
                if _perm_sign(a, b) < 0:
                    term = -term
                out[key] = out[key] + term if key in out else term
        return ExtElement(self.ctx, g, out)

    __xor__ = wedge

    def inner(self, other: "ExtElement"):
        """Hermitian inner product, conjugate-linear in ``other``."""
        self._same(other)
        acc = 0
        for k, c in self.coeffs.items():
            if k in other.coeffs:
                acc = acc + c * _conj(other.coeffs[k])
        return acc

    def __eq__(self, other):
        if not isinstance(other, ExtElement):
            return NotImplemented
        return (self - other).coeffs == {}

    __hash__ = None

    def __repr__(self):
        terms = " + ".join(
            f"({c})*e{''.join(str(i + 1) for i in k)}" for k, c in sorted(self.coeffs.items())
        )
        return f"ExtElement<{self.grade}>({terms or '0'})"


def _conj(c):
    if isinstance(c, MultiPoly):
        return c.conjugate()
    return conj(c)


def hodge_star(a: ExtElement) -> ExtElement:
    """Euclidean star: e_I -> sign(I, I^c) e_{I^c}."""
    full = range(a.ctx.dim)
    out = {}
    for k, c in a.coeffs.items():
        comp = tuple(i for i in full if i not in k)
        out[comp] = c if _perm_sign(k, comp) > 0 else -c
    return ExtElement(a.ctx, a.ctx.dim - a.grade, out)


def _projector(ctx: HodgeContext, sign: int):
    """Pi^+ or Pi^- as a function on middle-degree elements."""

    def apply(a: ExtElement) -> ExtElement:
        s = hodge_star(a)
        if ctx.complex:
            # Lambda^+- = ker(star -+ i): Pi^+- = (id -+ i star) / 2
            s = s.scale(-_I if sign > 0 else _I)
        elif sign < 0:
            s = -s
        return (a + s).scale(Fraction(1, 2))

    return apply


@dataclass(frozen=True)
class SelfDualSplit:
    """Pi^+-, and the bases beta_I^+- = 2 Pi^+- (e_1 ^ e_I) (alpha = beta / sqrt 2)."""

    ctx: HodgeContext
    index: tuple  # the (n-1)-tuples I, 0-based, inside {1, ..., 2n-1}
    beta_plus: tuple
    beta_minus: tuple

    def pi(self, sign: int):
        return _projector(self.ctx, sign)

    def projector_matrix(self, sign: int) -> list:
        """Matrix of Pi^{sign} on the lexicographic basis of Lambda^n."""
        basis = self.ctx.basis(self.ctx.n)
        P = self.pi(sign)
        cols = [P(ExtElement(self.ctx, self.ctx.n, {b: 1})).vector() for b in basis]
        return linalg.transpose(cols)

    def coords(self, w: ExtElement, sign: int) -> list:
        """sqrt(2) times the coordinates of w in the alpha^{sign} basis."""
        basis = self.beta_plus if sign > 0 else self.beta_minus
        return [w.inner(b) for b in basis]


@lru_cache(maxsize=None)
def sd_split(ctx: HodgeContext) -> SelfDualSplit:
    if ctx.dim % 2:
        raise ValueError("self-dual splitting needs an even ambient dimension")
    n = ctx.n
    index = tuple(itertools.combinations(range(1, ctx.dim), n - 1))
    plus, minus = [], []
    for I in index:
        base = ExtElement(ctx, n, {(0,) + I: 1})
        plus.append(_projector(ctx, 1)(base).scale(2))
        minus.append(_projector(ctx, -1)(base).scale(2))
    return SelfDualSplit(ctx, index, tuple(plus), tuple(minus))


def _matrix_between(split: SelfDualSplit, images: list, target_sign: int) -> list:
    """Matrix M_{JI} = <images[I], beta_J> / 2 in alpha bases."""
    basis = split.beta_plus if target_sign > 0 else split.beta_minus
    return [
        [_half(img.inner(bJ)) for img in images]
        for bJ in basis
    ]


def _half(x):
    return x * Fraction(1, 2)


def _p_images(split: SelfDualSplit, v: ExtElement) -> list:
    """2 Pi^-(v ^ star(beta_I^+ ^ v)) for every I."""
    minus = split.pi(-1)
    return [minus(v.wedge(hodge_star(b.wedge(v)))).scale(2) for b in split.beta_plus]


def intertwiner_p(ctx: HodgeContext, v) -> list:
    """Matrix of alpha -> 2 Pi^-(v ^ star(alpha ^ v)) from Lambda^+ to Lambda^- (alpha bases)."""
    if len(v) != ctx.dim:
        raise ValueError(f"vector must have {ctx.dim} coordinates")
    if sum(Fraction(x) ** 2 for x in v) != 1:
        raise ValueError("v must be an exact unit vector")
    split = sd_split(ctx)
    return _matrix_between(split, _p_images(split, ctx.vector(list(v))), -1)


def intertwiner_map(ctx: HodgeContext) -> MatrixPolyMap:
    """p as a polynomial matrix map S^{dim-1} -> SO (or U for odd n)."""
    split = sd_split(ctx)
    v = ctx.vector(MultiPoly.variables(ctx.dim))
    M = _matrix_between(split, _p_images(split, v), -1)
    M = [[e if isinstance(e, MultiPoly) else MultiPoly.constant(ctx.dim, e) for e in row] for row in M]
    return MatrixPolyMap(ctx.dim - 1, len(M), M, "U" if ctx.complex else "SO")


def extract_fiber_map(ctx: HodgeContext) -> SphereMap:
    """v -> coordinates of p(v)(alpha_1^+) in (alpha_1^-, alpha_2^-, alpha_3^-); the Hopf map."""
    if ctx.dim != 4:
        raise ValueError("fiber-map extraction is defined for dimension 4")
    return column_map(intertwiner_map(ctx), 1)


def _int_det(m: list) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    a = [row[:] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def _exterior_power_int(R: list, k: int) -> tuple:
    """(M, den) with Lambda^k R = M / den^k and M an integer matrix."""
    dim = len(R)
    den = 1
    for row in R:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    Ri = [[int(Fraction(x) * den) for x in row] for row in R]
    basis = list(itertools.combinations(range(dim), k))
    M = [[_int_det([[Ri[r][c] for c in I] for r in J]) for I in basis] for J in basis]
    return M, den


def exterior_power(R: list, k: int) -> list:
    """Matrix of Lambda^k R on the lexicographic basis (entries are k x k minors)."""
    M, den = _exterior_power_int(R, k)
    scale = Fraction(1, den**k)
    return [[x * scale for x in row] for row in M]


def _apply(M: list, ctx: HodgeContext, a: ExtElement) -> ExtElement:
    basis = ctx.basis(a.grade)
    vec = linalg.matvec(M, a.vector())
    return ExtElement(ctx, a.grade, dict(zip(basis, vec)))


def restrict_to_split(ctx: HodgeContext, L: list, sign: int) -> list:
    """Matrix of Lambda^n R on Lambda^{sign} in the alpha basis."""
    split = sd_split(ctx)
    basis = split.beta_plus if sign > 0 else split.beta_minus
    images = [_apply(L, ctx, b) for b in basis]
    return _matrix_between(split, images, sign)


def rational_rotation(dim: int, seed: int = 0, height: int = 3) -> list:
    """Exact element of SO(dim): Cayley transform of a random rational skew matrix."""
    if dim < 2:
        raise ValueError("rotations need dim >= 2")
    rng = random.Random(seed)
    while True:
        S = [[Fraction(0)] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(i + 1, dim):
                x = Fraction(rng.randint(-height, height), rng.randint(1, height))
                S[i][j], S[j][i] = x, -x
        try:
            return linalg.cayley(S)
        except ZeroDivisionError:  # cannot happen for real skew S; redraw anyway
            continue


@dataclass
class EquivarianceReport:
    trials: int
    failures: int
    isometry_failures: int
    star_commutation_failures: int

    @property
    def passed(self) -> bool:
        return not (self.failures or self.isometry_failures or self.star_commutation_failures)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "isometry_failures": self.isometry_failures,
            "star_commutation_failures": self.star_commutation_failures,
        }


def _orthogonal(M: list) -> bool:
    return linalg.is_identity(linalg.matmul(linalg.adjoint(M), M))


def verify_p_equivariance(ctx: HodgeContext, trials: int, seed: int = 0,
                          rotations: list | None = None) -> EquivarianceReport:
    """Check p(Rv) o Lambda^n R == Lambda^n R o p(v) on Lambda^+ for random exact R and v."""
    from .poly_core import rational_sphere_points

    if trials < 1:
        raise ValueError("need at least one trial")
    n = ctx.n
    star = [hodge_star(ExtElement(ctx, n, {b: 1})).vector() for b in ctx.basis(n)]
    star = linalg.transpose(star)
    rng = random.Random(seed)
    fails = iso_fails = star_fails = 0
    for t in range(trials):
        R = rotations[t] if rotations is not None else rational_rotation(ctx.dim, rng.randrange(2**31))
        v = rational_sphere_points(ctx.dim - 1, 1, rng.randrange(2**31))[0]
        Rv = linalg.matvec(R, v)
        M, den = _exterior_power_int(R, n)
        Mt = linalg.transpose(M)
        # Lambda^n R orthogonal  <=>  M^T M = den^{2n} I
        if linalg.matmul(Mt, M) != linalg.identity(len(M), den ** (2 * n)):
            iso_fails += 1
        if linalg.matmul(M, star) != linalg.matmul(star, M):
            star_fails += 1
        scale = Fraction(1, den**n)
        L = [[x * scale for x in row] for row in M]
        Ap = restrict_to_split(ctx, L, 1)
        Am = restrict_to_split(ctx, L, -1)
        pv = intertwiner_p(ctx, v)
        pRv = intertwiner_p(ctx, Rv)
        if not (_orthogonal(pv) and _orthogonal(pRv)):
            iso_fails += 1
        if linalg.matmul(pRv, Ap) != linalg.matmul(Am, pv):
            fails += 1
    return EquivarianceReport(trials, fails, iso_fails, star_fails)


# U(1) characters


@dataclass(frozen=True)
class LaurentChar:
    """Weight multiplicities of a U(1)-representation, {weight: multiplicity}."""

    mults: tuple  # sorted ((weight, multiplicity), ...), descending weight

    @classmethod
    def from_dict(cls, d) -> "LaurentChar":
        return cls(tuple(sorted(((w, m) for w, m in d.items() if m), reverse=True)))

    def as_dict(self) -> dict:
        return dict(self.mults)

    @property
    def dim(self) -> int:
        return sum(m for _, m in self.mults)

    def __add__(self, other: "LaurentChar") -> "LaurentChar":
        return LaurentChar.from_dict(Counter(self.as_dict()) + Counter(other.as_dict()))

    def __getitem__(self, w: int) -> int:
        return self.as_dict().get(w, 0)

    def __str__(self):
        return "{" + ", ".join(f"{w:+d}: {m}" for w, m in self.mults) + "}"


def u1_char_exterior(n: int, k: int) -> LaurentChar:
    """Weights of Lambda^k of n copies of the rotation representation: [t^k] (1 + (z + 1/z) t + t^2)^n."""
    if n < 1 or not 0 <= k <= 2 * n:
        raise ValueError("need n >= 1 and 0 <= k <= 2n")
    series = {0: Counter({0: 1})}  # t-degree -> weight multiplicities
    factor = {0: {0: 1}, 1: {1: 1, -1: 1}, 2: {0: 1}}
    for _ in range(n):
        nxt: dict = {}
        for da, wa in series.items():
            for db, wb in factor.items():
                acc = nxt.setdefault(da + db, Counter())
                for w1, m1 in wa.items():
                    for w2, m2 in wb.items():
                        acc[w1 + w2] += m1 * m2
        series = nxt
    return LaurentChar.from_dict(series.get(k, {}))


def sd_characters(n: int) -> tuple:
    """U(1)-characters of (Lambda^+, Lambda^-) in Lambda^n R^{2n} (complexified).

    Weight vectors are wedges of f_j^+- = e_{2j-1} -+ i e_{2j} (weight +-1);
    on each weight space the multiplicity of Lambda^+ is rank(Pi^+).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    ctx = HodgeContext(2 * n)
    split = sd_split(ctx)
    vecs = []
    for j in range(n):
        a, b = ctx.e(2 * j + 1), ctx.e(2 * j + 2)
        vecs.append((a + b.scale(-_I), 1))
        vecs.append((a + b.scale(_I), -1))
    by_weight: dict = {}
    for choice in itertools.combinations(vecs, n):
        w = ExtElement(ctx, 0, {(): 1})
        for vec, _ in choice:
            w = w.wedge(vec)
        weight = sum(s for _, s in choice)
        by_weight.setdefault(weight, []).append(w)
    plus, minus = {}, {}
    for weight, ws in by_weight.items():
        for sign, store in ((1, plus), (-1, minus)):
            P = split.pi(sign)
            store[weight] = linalg.rank([P(w).vector() for w in ws])
    return LaurentChar.from_dict(plus), LaurentChar.from_dict(minus)
