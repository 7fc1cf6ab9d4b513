"""Exact multivariate polynomials over Q and Q(i), and normal forms on spheres.

Exponent vectors are stored packed into a single Python int, ``_BITS`` bits
per variable, so that multiplying monomials is one integer addition.  The
public surface always speaks in exponent tuples.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "GaussianRational",
    "MultiPoly",
    "SphereContext",
    "nf_reduce",
    "rational_sphere_points",
    "parse_coeff",
    "format_coeff",
    "poly_to_json",
    "poly_from_json",
]

_BITS = 16
_MASK = (1 << _BITS) - 1


class GaussianRational:
    """An element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + im
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            return GaussianRational(a * c - b * d, a * d + b * c)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """|z|^2, exact."""
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({format_coeff(self)!r})"


I = GaussianRational(0, 1)


def conj(c):
    """Complex conjugate of any supported scalar."""
    return c.conjugate() if isinstance(c, GaussianRational) else c


_COMPLEX_RE = re.compile(
    r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*\*?\s*i\s*$"
)


def parse_coeff(text: str):
    """Parse ``"p/q"`` or ``"p/q+r/s i"`` into a Fraction or GaussianRational."""
    if not isinstance(text, str):
        if isinstance(text, bool):
            raise ValueError(f"bad coefficient {text!r}")
        if isinstance(text, int):
            return text
        raise ValueError(f"coefficient must be a string, got {text!r}")
    m = _COMPLEX_RE.match(text)
    if m:
        im = Fraction(m.group(3))
        if m.group(2) == "-":
            im = -im
        return GaussianRational(Fraction(m.group(1)), im)
    try:
        q = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad coefficient {text!r}") from exc
    # plain ints keep integer-coefficient arithmetic fast
    return q.numerator if q.denominator == 1 else q


def format_coeff(c) -> str:
    if isinstance(c, GaussianRational):
        sign = "-" if c.im < 0 else "+"
        return f"{c.re}{sign}{abs(c.im)} i"
    return str(Fraction(c))


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def _unpack(key: int, nvars: int) -> tuple:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(nvars))


def _key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & _MASK
        key >>= _BITS
    return d


def _clean(d: dict) -> dict:
    return {k: c for k, c in d.items() if c}


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables v_1..v_nvars.

    Coefficients are ints, Fractions or GaussianRationals.  Arithmetic with
    plain scalars is supported on both sides.
    """

    __slots__ = ("nvars", "_t", "_deg")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        t = {}
        for exps, c in (terms or {}).items():
            if len(exps) != nvars:
                raise ValueError(
                    f"exponent vector {tuple(exps)} has length {len(exps)}, expected {nvars}"
                )
            if isinstance(c, float):
                raise TypeError("floating-point coefficients are not supported")
            if c:
                k = _pack(exps)
                t[k] = t.get(k, 0) + c
        self.nvars = nvars
        self._t = _clean(t)
        self._deg = None

    @classmethod
    def _raw(cls, nvars: int, t: dict) -> "MultiPoly":
        p = object.__new__(cls)
        p.nvars = nvars
        p._t = t
        p._deg = None
        return p

    # construction helpers

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        return cls._raw(nvars, {0: c} if c else {})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        """The coordinate v_{i+1} (0-based index ``i``)."""
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        return cls._raw(nvars, {1 << (_BITS * i): 1})

    @classmethod
    def variables(cls, nvars: int) -> list:
        return [cls.variable(nvars, i) for i in range(nvars)]

    @classmethod
    def norm_squared(cls, nvars: int, indices: Iterable[int] | None = None) -> "MultiPoly":
        """Sum of v_i^2 over ``indices`` (all variables by default)."""
        idx = range(nvars) if indices is None else indices
        return cls._raw(nvars, {2 << (_BITS * i): 1 for i in idx})

    # inspection

    @property
    def terms(self) -> dict:
        """Terms as {exponent tuple: coefficient}, graded-lex descending."""
        items = [(_unpack(k, self.nvars), c) for k, c in self._t.items()]
        items.sort(key=lambda kc: (sum(kc[0]), kc[0]), reverse=True)
        return dict(items)

    def __len__(self):
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._deg is None:
            self._deg = max((_key_degree(k) for k in self._t), default=-1)
        return self._deg

    def degree_in(self, i: int) -> int:
        shift = _BITS * i
        return max(((k >> shift) & _MASK for k in self._t), default=-1)

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def constant_term(self):
        return self._t.get(0, 0)

    def is_homogeneous(self) -> bool:
        return len({_key_degree(k) for k in self._t}) <= 1

    def is_complex(self) -> bool:
        return any(isinstance(c, GaussianRational) for c in self._t.values())

    def coefficients(self):
        return list(self._t.values())

    # arithmetic

    def _check(self, other: "MultiPoly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable-count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            t = dict(self._t)
            for k, c in other._t.items():
                t[k] = t.get(k, 0) + c
            return MultiPoly._raw(self.nvars, _clean(t))
        if isinstance(other, (int, Fraction, GaussianRational)):
            t = dict(self._t)
            t[0] = t.get(0, 0) + other
            return MultiPoly._raw(self.nvars, _clean(t))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        if isinstance(other, (MultiPoly, int, Fraction, GaussianRational)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            if self.degree() + other.degree() > _MASK:
                raise OverflowError("polynomial degree exceeds packed exponent range")
            out: dict = {}
            _addmul(out, self._t, other._t)
            return MultiPoly._raw(self.nvars, _clean(out))
        if isinstance(other, (int, Fraction, GaussianRational)):
            if not other:
                return MultiPoly.zero(self.nvars)
            return MultiPoly._raw(self.nvars, _clean({k: c * other for k, c in self._t.items()}))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            inv = Fraction(1) / other if not isinstance(other, GaussianRational) else 1 / other
            return self * inv
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._t == other._t
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self._t == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._t.items())))

    # transformations

    def conjugate(self) -> "MultiPoly":
        """Conjugate coefficients (variables are real)."""
        return MultiPoly._raw(self.nvars, {k: conj(c) for k, c in self._t.items()})

    def real_part(self) -> "MultiPoly":
        t = {k: (c.re if isinstance(c, GaussianRational) else c) for k, c in self._t.items()}
        return MultiPoly._raw(self.nvars, _clean(t))

    def imag_part(self) -> "MultiPoly":
        t = {k: c.im for k, c in self._t.items() if isinstance(c, GaussianRational)}
        return MultiPoly._raw(self.nvars, _clean(t))

    def derivative(self, i: int) -> "MultiPoly":
        shift = _BITS * i
        unit = 1 << shift
        out = {}
        for k, c in self._t.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - unit] = c * e
        return MultiPoly._raw(self.nvars, out)

    def homogeneous_parts(self) -> dict:
        """{degree: homogeneous component}."""
        parts: dict = {}
        for k, c in self._t.items():
            parts.setdefault(_key_degree(k), {})[k] = c
        return {d: MultiPoly._raw(self.nvars, t) for d, t in sorted(parts.items())}

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0
        for k, c in self._t.items():
            term = c
            for i, e in enumerate(_unpack(k, self.nvars)):
                if e:
                    term = term * point[i] ** e
            total = total + term
        return total

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose: replace v_i by ``images[i]`` (all sharing one variable count)."""
        if len(images) != self.nvars:
            raise ValueError(
                f"substitution needs {self.nvars} polynomials, got {len(images)}"
            )
        if not images:
            return self
        m = images[0].nvars
        for q in images:
            if q.nvars != m:
                raise ValueError("substituted polynomials disagree on variable count")
        powers: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in powers:
                powers[key] = images[i] if e == 1 else power(i, e - 1) * images[i]
            return powers[key]

        out: dict = {0: 0}
        for k, c in self._t.items():
            mono = {0: c}
            for i, e in enumerate(_unpack(k, self.nvars)):
                if e:
                    nxt: dict = {}
                    _addmul(nxt, mono, power(i, e)._t)
                    mono = nxt
            for kk, cc in mono.items():
                out[kk] = out.get(kk, 0) + cc
        return MultiPoly._raw(m, _clean(out))

    def set_variable(self, i: int, value) -> "MultiPoly":
        """Specialise v_{i+1} to a scalar (variable count unchanged)."""
        shift = _BITS * i
        out: dict = {}
        for k, c in self._t.items():
            e = (k >> shift) & _MASK
            if e:
                if not value:
                    continue
                c = c * value**e
                k = k - (e << shift)
            out[k] = out.get(k, 0) + c
        return MultiPoly._raw(self.nvars, _clean(out))

    def select_variables(self, keep: Sequence[int]) -> "MultiPoly":
        """Re-express in the variables ``keep`` (all others must be absent)."""
        pos = {old: new for new, old in enumerate(keep)}
        out = {}
        for k, c in self._t.items():
            exps = _unpack(k, self.nvars)
            new = [0] * len(keep)
            for i, e in enumerate(exps):
                if e:
                    if i not in pos:
                        raise ValueError(f"variable v{i + 1} still present")
                    new[pos[i]] = e
            out[_pack(new)] = c
        return MultiPoly._raw(len(keep), out)

    def embed(self, nvars: int, positions: Sequence[int] | None = None) -> "MultiPoly":
        """View as a polynomial in ``nvars`` variables; variable i goes to positions[i]."""
        positions = list(range(self.nvars)) if positions is None else list(positions)
        out = {}
        for k, c in self._t.items():
            new = [0] * nvars
            for i, e in enumerate(_unpack(k, self.nvars)):
                new[positions[i]] += e
            out[_pack(new)] = c
        return MultiPoly._raw(nvars, out)

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for exps, c in self.terms.items():
            mono = "*".join(
                f"v{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e
            )
            cs = format_coeff(c)
            if isinstance(c, GaussianRational):
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _addmul(out: dict, a: dict, b: dict) -> None:
    """out += a*b on packed term maps (zeros are left in place)."""
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb


def _addsquare(out: dict, a: dict) -> None:
    """out += a*a using the symmetric half of the product."""
    get = out.get
    items = list(a.items())
    for idx, (ka, ca) in enumerate(items):
        k = ka + ka
        out[k] = get(k, 0) + ca * ca
        twice = 2 * ca
        for kb, cb in items[idx + 1:]:
            k = ka + kb
            out[k] = get(k, 0) + twice * cb
    return None


def sum_of_squares(polys: Iterable[MultiPoly], nvars: int, constant=0) -> MultiPoly:
    """constant + sum of p^2 (real squares, no conjugation)."""
    out: dict = {0: constant} if constant else {}
    for p in polys:
        if p.nvars != nvars:
            raise ValueError("variable-count mismatch")
        _addsquare(out, p._t)
    return MultiPoly._raw(nvars, _clean(out))


def sum_of_products(pairs: Iterable[tuple], nvars: int, constant=0) -> MultiPoly:
    """constant + sum of p*q over ``pairs``, accumulated in one pass."""
    out: dict = {0: constant} if constant else {}
    for p, q in pairs:
        if p.nvars != nvars or q.nvars != nvars:
            raise ValueError("variable-count mismatch")
        _addmul(out, p._t, q._t)
    return MultiPoly._raw(nvars, _clean(out))


@dataclass(frozen=True)
class SphereContext:
    """The quotient ring Q[v_1..v_{n+1}] / <|v|^2 - 1> for S^n."""

    nvars: int

    def __post_init__(self):
        if self.nvars < 1:
            raise ValueError("a sphere context needs at least one variable")

    @classmethod
    def of_sphere(cls, n: int) -> "SphereContext":
        return cls(n + 1)

    @property
    def dim(self) -> int:
        return self.nvars - 1

    @property
    def generator(self) -> MultiPoly:
        return MultiPoly.norm_squared(self.nvars) - 1


def nf_reduce(p: MultiPoly, ctx: SphereContext) -> MultiPoly:
    """Canonical representative of p modulo |v|^2 - 1.

    Rewrites v_last^2 -> 1 - (v_1^2 + ... + v_{n}^2); the result has degree
    at most one in the last variable and is unique.
    """
    if p.nvars != ctx.nvars:
        raise ValueError(f"variable-count mismatch: {p.nvars} vs context {ctx.nvars}")
    n = ctx.nvars
    shift = _BITS * (n - 1)
    if p.degree_in(n - 1) <= 1:
        return p
    # split by exponent of the last variable
    by_e: dict = {}
    for k, c in p._t.items():
        e = k >> shift
        by_e.setdefault(e, {})[k - (e << shift)] = c
    top = max(by_e)
    squares = [2 << (_BITS * i) for i in range(n - 1)]

    def times_u(acc: dict) -> dict:
        out = dict(acc)
        get = out.get
        for k, c in acc.items():
            for s in squares:
                ks = k + s
                out[ks] = get(ks, 0) - c
        return out

    result: dict = {}
    for parity in (0, 1):
        degs = range(top - ((top - parity) % 2), parity - 1, -2)
        acc: dict = {}
        for e in degs:
            if acc:
                acc = times_u(acc)
            for k, c in by_e.get(e, {}).items():
                acc[k] = acc.get(k, 0) + c
            acc = _clean(acc)
        lift = (1 << shift) if parity else 0
        for k, c in acc.items():
            result[k + lift] = c
    return MultiPoly._raw(n, result)


def rational_sphere_points(n: int, count: int, seed: int = 0, height: int = 9) -> list:
    """``count`` exact points on S^n via inverse stereographic projection.

    v_1 = (1 - |t|^2)/(1 + |t|^2), v_{i+1} = 2 t_i/(1 + |t|^2) for random
    rational t in Q^n.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        t = [Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(n)]
        s = sum(x * x for x in t)
        den = 1 + s
        pts.append(tuple([(1 - s) / den] + [2 * x / den for x in t]))
    return pts


def poly_to_json(p: MultiPoly) -> dict:
    return {
        "nvars": p.nvars,
        "terms": [
            {"exps": list(exps), "coeff": format_coeff(c)} for exps, c in p.terms.items()
        ],
    }


def poly_from_json(obj: Mapping) -> MultiPoly:
    try:
        nvars = int(obj["nvars"])
        terms = {}
        for term in obj["terms"]:
            exps = tuple(int(e) for e in term["exps"])
            if exps in terms:
                raise ValueError(f"duplicate exponent vector {exps}")
            terms[exps] = parse_coeff(term["coeff"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed polynomial JSON: {exc}") from exc
    return MultiPoly(nvars, terms)
