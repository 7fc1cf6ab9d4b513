"""Wilson loop vectors and trace-formula coefficients over Schottky groups.

Words are strings over the letters a, b, c, ...; an upper-case letter is the
inverse generator.  Conjugacy classes of the free group are represented by
cyclically reduced words in their minimal cyclic rotation, with the letter
order a < A < b < B < ...
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .poly_core import GaussianRational, format_coeff, parse_coeff

__all__ = [
    "SchottkyGroup",
    "FlatBundle",
    "ClassEntry",
    "SpectrumReport",
    "DegenerateClassError",
    "parse_word",
    "free_reduce",
    "canonical_class",
    "inverse_word",
    "reverse_word",
    "enumerate_classes",
    "geodesic_length",
    "holonomy",
    "wilson_vector",
    "gauge_conjugate",
    "dg_coefficient",
    "evaluate_classes",
    "check_simple_length_spectrum",
    "trivial_bundle",
    "character_bundle",
    "random_unitary",
    "random_unitary_bundle",
    "symmetric_example",
    "perturbed_example",
]


class DegenerateClassError(ValueError):
    """The class is represented by a non-hyperbolic matrix."""


# Words


def _letter_rank(ch: str) -> int:
    return 2 * (ord(ch.lower()) - ord("a")) + ch.isupper()


def _word_key(w: str) -> tuple:
    return tuple(_letter_rank(c) for c in w)


def inverse_word(w: str) -> str:
    return w[::-1].swapcase()


def reverse_word(w: str) -> str:
    return w[::-1]


def free_reduce(w: str) -> str:
    out: list = []
    for ch in w:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def parse_word(text: str) -> str:
    """Accepts 'aB', 'a b^-1', 'a^2 B' and similar; returns the freely reduced word."""
    tokens = text.replace("*", " ").split()
    if len(tokens) == 1 and "^" not in tokens[0]:
        tokens = list(tokens[0])
    out = []
    for tok in tokens:
        base, _, exp = tok.partition("^")
        if len(base) != 1 or not base.isalpha():
            raise ValueError(f"bad word token {tok!r}")
        k = int(exp) if exp else 1
        out.append((base if k > 0 else base.swapcase()) * abs(k))
    return free_reduce("".join(out))


def _cyclic_reduce(w: str) -> str:
    w = free_reduce(w)
    while len(w) > 1 and w[0] == w[-1].swapcase():
        w = w[1:-1]
    return w


def canonical_class(w: str) -> str:
    """Minimal cyclic rotation of the cyclic reduction of w."""
    w = _cyclic_reduce(w)
    if not w:
        return w
    return min((w[i:] + w[:i] for i in range(len(w))), key=_word_key)


def _root(w: str) -> tuple:
    """(u, k) with w = u^k and k maximal."""
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p], n // p
    return w, 1


# Groups and bundles


def _matrix(rows) -> list:
    return [[parse_coeff(x) if isinstance(x, str) else x for x in row] for row in rows]


def _trace(m: list):
    return sum((m[i][i] for i in range(len(m))), 0)


@dataclass(frozen=True)
class SchottkyGroup:
    """Free group on hyperbolic SL(2, Q) generators, letters a, b, c, ... in order."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(tuple(tuple(Fraction(x) for x in row) for row in _matrix(g)) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if len(gens) < 2:
            raise ValueError("a Schottky group needs rank >= 2")
        for i, g in enumerate(gens):
            if len(g) != 2 or any(len(r) != 2 for r in g):
                raise ValueError(f"generator {i} is not 2x2")
            if g[0][0] * g[1][1] - g[0][1] * g[1][0] != 1:
                raise ValueError(f"generator {i} does not have determinant 1")
            if abs(g[0][0] + g[1][1]) <= 2:
                raise ValueError(f"generator {i} is not hyperbolic")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def letters(self) -> str:
        return "".join(chr(ord("a") + i) for i in range(self.rank))

    def matrix(self, w: str) -> list:
        out = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
        for ch in w:
            (a, b), (c, d) = self.generators[ord(ch.lower()) - ord("a")]
            if ch.isupper():
                a, b, c, d = d, -b, -c, a
            out = [
                [out[0][0] * a + out[0][1] * c, out[0][0] * b + out[0][1] * d],
                [out[1][0] * a + out[1][1] * c, out[1][0] * b + out[1][1] * d],
            ]
        return out

    def trace(self, w: str) -> Fraction:
        m = self.matrix(w)
        return m[0][0] + m[1][1]

    def to_json(self) -> dict:
        return {"generators": [[[str(x) for x in row] for row in g] for g in self.generators]}

    @classmethod
    def from_json(cls, obj) -> "SchottkyGroup":
        return cls(tuple(_matrix(g) for g in obj["generators"]))


@dataclass(frozen=True)
class FlatBundle:
    """Flat bundle given by one orthogonal/unitary image per generator."""

    rank: int
    field: str
    images: tuple

    def __post_init__(self):
        if self.field not in ("R", "C"):
            raise ValueError("field must be 'R' or 'C'")
        imgs = tuple(tuple(tuple(r) for r in _matrix(m)) for m in self.images)
        object.__setattr__(self, "images", imgs)
        for i, m in enumerate(imgs):
            if len(m) != self.rank or any(len(r) != self.rank for r in m):
                raise ValueError(f"image {i} is not {self.rank}x{self.rank}")
            if self.field == "R" and any(isinstance(x, GaussianRational) and x.im for r in m for x in r):
                raise ValueError(f"image {i} has complex entries in a real bundle")
            if not linalg.is_identity(linalg.matmul(linalg.adjoint(list(map(list, m))), list(map(list, m)))):
                raise ValueError(f"image {i} is not orthogonal/unitary")

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "field": self.field,
            "images": [[[format_coeff(x) for x in row] for row in m] for m in self.images],
        }

    @classmethod
    def from_json(cls, obj) -> "FlatBundle":
        return cls(int(obj["rank"]), obj.get("field", "C"), tuple(_matrix(m) for m in obj["images"]))


def trivial_bundle(ngens: int, rank: int = 1, field: str = "R") -> FlatBundle:
    return FlatBundle(rank, field, tuple(linalg.identity(rank) for _ in range(ngens)))


def character_bundle(values) -> FlatBundle:
    """Rank-1 bundle with the given (unit) scalar per generator."""
    vals = [parse_coeff(v) if isinstance(v, str) else v for v in values]
    real = all(not isinstance(v, GaussianRational) or not v.im for v in vals)
    return FlatBundle(1, "R" if real else "C", tuple([[v]] for v in vals))


def random_unitary(rank: int, rng: random.Random, field: str = "C", height: int = 3) -> list:
    """Exact orthogonal/unitary matrix: Cayley transform of a random skew(-Hermitian) matrix."""

    def draw():
        return Fraction(rng.randint(-height, height), rng.randint(1, height))

    S = [[Fraction(0)] * rank for _ in range(rank)]
    for i in range(rank):
        if field == "C":
            S[i][i] = GaussianRational(0, draw())
        for j in range(i + 1, rank):
            x = GaussianRational(draw(), draw()) if field == "C" else draw()
            S[i][j] = x
            S[j][i] = -x.conjugate() if field == "C" else -x
    return linalg.cayley(S)


def random_unitary_bundle(ngens: int, rank: int, seed: int = 0, field: str = "C") -> FlatBundle:
    rng = random.Random(seed)
    return FlatBundle(rank, field, tuple(random_unitary(rank, rng, field) for _ in range(ngens)))


def gauge_conjugate(B: FlatBundle, U) -> FlatBundle:
    """Images replaced by U^{-1} . image . U for a constant orthogonal/unitary U."""
    U = [list(r) for r in _matrix(U)]
    if len(U) != B.rank or any(len(r) != B.rank for r in U):
        raise ValueError("gauge matrix has the wrong size")
    Uinv = linalg.adjoint(U)
    if not linalg.is_identity(linalg.matmul(Uinv, U)):
        raise ValueError("gauge matrix is not orthogonal/unitary")
    field = B.field
    if any(isinstance(x, GaussianRational) and x.im for r in U for x in r):
        field = "C"
    imgs = tuple(linalg.matmul(linalg.matmul(Uinv, [list(r) for r in m]), U) for m in B.images)
    return FlatBundle(B.rank, field, imgs)


def holonomy(B: FlatBundle, w: str) -> list:
    """Ordered product of generator images (inverse letters use the adjoint)."""
    out = linalg.identity(B.rank)
    for ch in w:
        k = ord(ch.lower()) - ord("a")
        if k >= len(B.images):
            raise ValueError(f"letter {ch!r} has no image in the bundle")
        m = [list(r) for r in B.images[k]]
        out = linalg.matmul(out, linalg.adjoint(m) if ch.isupper() else m)
    return out


class _HolonomyCache:
    """Holonomies of prefixes, so a batch of words costs one product per new prefix."""

    def __init__(self, B: FlatBundle):
        self.B = B
        self.letters = {}
        for k, m in enumerate(B.images):
            m = [list(r) for r in m]
            self.letters[chr(ord("a") + k)] = m
            self.letters[chr(ord("A") + k)] = linalg.adjoint(m)
        self.cache = {"": linalg.identity(B.rank)}

    def __call__(self, w: str) -> list:
        hit = self.cache.get(w)
        if hit is not None:
            return hit
        if w[-1] not in self.letters:
            raise ValueError(f"letter {w[-1]!r} has no image in the bundle")
        out = linalg.matmul(self(w[:-1]), self.letters[w[-1]])
        self.cache[w] = out
        return out


def wilson_vector(B: FlatBundle, classes) -> list:
    hol = _HolonomyCache(B)
    return [_trace(hol(c if isinstance(c, str) else c.word)) for c in classes]


# Classes


@dataclass(frozen=True)
class ClassEntry:
    word: str
    primitive: bool
    root: str
    power: int
    trace: Fraction | None = None
    length: float | None = None
    root_length: float | None = None
    wilson: object = None
    dg_coeff: object = None

    def to_json(self) -> dict:
        def num(x):
            if isinstance(x, complex):
                return [x.real, x.imag]
            return x

        return {
            "word": self.word,
            "primitive": self.primitive,
            "root": self.root,
            "power": self.power,
            "trace": None if self.trace is None else str(self.trace),
            "length": self.length,
            "root_length": self.root_length,
            "wilson": None if self.wilson is None else format_coeff(self.wilson),
            "dg_coeff": num(self.dg_coeff),
        }


def _stub(w: str) -> ClassEntry:
    root, k = _root(w)
    return ClassEntry(w, k == 1, root, k)


def enumerate_classes(G: SchottkyGroup, max_len: int) -> list:
    """One stub per oriented conjugacy class of length <= max_len, canonical and sorted."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    letters = [c for g in G.letters for c in (g, g.upper())]
    found = set()
    frontier = list(letters)
    for length in range(1, max_len + 1):
        for w in frontier:
            if length == 1 or w[0] != w[-1].swapcase():
                found.add(canonical_class(w))
        if length < max_len:
            frontier = [w + c for w in frontier for c in letters if c != w[-1].swapcase()]
    return [_stub(w) for w in sorted(found, key=lambda w: (len(w), _word_key(w)))]


def _length_from_trace(t) -> float:
    x = abs(Fraction(t))
    if x <= 2:
        raise DegenerateClassError(f"trace {t} is not hyperbolic")
    return 2.0 * math.acosh(float(x) / 2.0)


def geodesic_length(G: SchottkyGroup, w: str) -> float:
    """2 arccosh(|tr|/2) of the product matrix."""
    if not w:
        raise DegenerateClassError("the empty word has no geodesic")
    return _length_from_trace(G.trace(w))


def dg_coefficient(entry: ClassEntry, B: FlatBundle, W=None):
    """l(c#) W(c) / (2 pi * 2 sinh(l(c)/2)); complex when the Wilson value is."""
    if not entry.length or not entry.root_length:
        raise ValueError("class entry needs positive lengths")
    if W is None:
        W = _trace(holonomy(B, entry.word))
    denom = 2 * math.pi * 2 * math.sinh(entry.length / 2)
    if isinstance(W, GaussianRational) and W.im:
        return complex(W) * entry.root_length / denom
    return float(W.re if isinstance(W, GaussianRational) else W) * entry.root_length / denom


def evaluate_classes(G: SchottkyGroup, max_len: int, B: FlatBundle | None = None) -> list:
    """Enumerate, then fill lengths (and Wilson / DG data when a bundle is given)."""
    out = []
    root_len: dict = {}
    hol = _HolonomyCache(B) if B is not None else None
    for s in enumerate_classes(G, max_len):
        t = G.trace(s.word)
        ell = _length_from_trace(t)
        if s.root not in root_len:
            root_len[s.root] = geodesic_length(G, s.root)
        e = ClassEntry(s.word, s.primitive, s.root, s.power, t, ell, root_len[s.root])
        if B is not None:
            W = _trace(hol(s.word))
            e = ClassEntry(e.word, e.primitive, e.root, e.power, t, ell, e.root_length, W, dg_coefficient(e, B, W))
        out.append(e)
    out.sort(key=lambda e: (e.length, len(e.word), _word_key(e.word)))
    return out


# Length spectrum


@dataclass
class SpectrumReport:
    tol: float
    symmetries: tuple
    collisions: list = field(default_factory=list)  # (w1, w2, |l1 - l2|)
    forced: list = field(default_factory=list)  # (w1, w2, symmetry)

    @property
    def simple(self) -> bool:
        return not self.collisions

    def to_json(self) -> dict:
        return {
            "tol": self.tol,
            "symmetries": list(self.symmetries),
            "simple": self.simple,
            "collisions": [list(c) for c in self.collisions],
            "forced_pair_count": len(self.forced),
        }


def _orbit_maps(symmetries) -> list:
    maps = [lambda w: w]
    if "inverse" in symmetries:
        maps.append(inverse_word)
    if "reversal" in symmetries:
        maps.append(reverse_word)
        if "inverse" in symmetries:
            maps.append(lambda w: inverse_word(reverse_word(w)))
    return maps


def check_simple_length_spectrum(classes, tol: float, symmetries=None) -> SpectrumReport:
    """Pairs of classes with |l1 - l2| < tol that are not forced equal by a symmetry.

    ``symmetries`` defaults to ("inverse",) plus "reversal" when the words use
    exactly two generators: for two generators every SL(2) trace satisfies
    tr(w) = tr(reversed w), so those coincidences are forced as well.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    entries = [(c.length, c.word) for c in classes]
    if symmetries is None:
        gens = {ch.lower() for _, w in entries for ch in w}
        symmetries = ("inverse", "reversal") if len(gens) == 2 else ("inverse",)
    symmetries = tuple(symmetries)
    maps = _orbit_maps(symmetries)
    names = ["identity", "inverse", "reversal", "inverse-reversal"]
    if "inverse" not in symmetries:
        names = ["identity", "reversal"]

    def orbit_of(w):
        return {canonical_class(f(w)): name for f, name in zip(maps, names)}

    report = SpectrumReport(tol, symmetries)
    entries.sort()
    for i, (li, wi) in enumerate(entries):
        orbit = None
        for j in range(i + 1, len(entries)):
            lj, wj = entries[j]
            if lj - li >= tol:
                break
            if orbit is None:
                orbit = orbit_of(wi)
            if wj in orbit:
                report.forced.append((wi, wj, orbit[wj]))
            else:
                report.collisions.append((wi, wj, abs(lj - li)))
    return report


# Reference configurations

_A = [["3", "0"], ["0", "1/3"]]


def symmetric_example() -> SchottkyGroup:
    """a = diag(3, 1/3) and its conjugate by a 45-degree rotation.

    Both generators have length 2 ln 3, so (a, b) is a planted collision.
    tr[a, b] = -2 - 700/81 < -2, hence a discrete free group (one-holed torus).
    """
    return SchottkyGroup((_A, [["5/3", "4/3"], ["4/3", "5/3"]]))


def perturbed_example() -> SchottkyGroup:
    """a = diag(3, 1/3) and b = P diag(4, 1/4) P^{-1} with P = [[-2, 1], [-1, -1]].

    tr[a, b] = -182/9 < -2 (discrete free), and the generators have different lengths.
    """
    return SchottkyGroup((_A, [["11/4", "5/2"], ["5/4", "3/2"]]))


def group_from_file(path: str) -> SchottkyGroup:
    with open(path) as fh:
        return SchottkyGroup.from_json(json.load(fh))


def bundle_from_file(path: str) -> FlatBundle:
    with open(path) as fh:
        return FlatBundle.from_json(json.load(fh))
