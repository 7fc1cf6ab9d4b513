"""Clifford systems, normed bilinear maps and the Hopf construction."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .poly_core import MultiPoly, format_coeff, parse_coeff, sum_of_products
from .sphere_maps import SphereMap, compose, include_map

__all__ = [
    "CliffordSystem",
    "NormedBilinear",
    "radon_hurwitz",
    "clifford_system",
    "normed_bilinear_from_clifford",
    "real_multiplication",
    "complex_multiplication",
    "verify_normed",
    "hopf_construction",
    "odd_sphere_fibration",
    "chain_witness",
    "CHAINS",
]


def radon_hurwitz(m: int) -> int:
    """rho(m) = 8d + 2^c where m = odd * 2^(c + 4d), 0 <= c <= 3."""
    if m < 1:
        raise ValueError("Radon-Hurwitz number needs m >= 1")
    a = (m & -m).bit_length() - 1
    d, c = divmod(a, 4)
    return 8 * d + 2**c


@dataclass(frozen=True, eq=False)
class CliffordSystem:
    """Anticommuting orthogonal complex structures J_1..J_k on R^dim."""

    dim: int
    structures: tuple

    def check(self) -> list:
        """Return a list of violated identities (empty when valid)."""
        eye = np.eye(self.dim, dtype=np.int64)
        problems = []
        for a, J in enumerate(self.structures):
            if J.shape != (self.dim, self.dim):
                problems.append(f"J{a + 1} has shape {J.shape}")
                continue
            if not np.array_equal(J.T @ J, eye):
                problems.append(f"J{a + 1} not orthogonal")
            if not np.array_equal(J @ J, -eye):
                problems.append(f"J{a + 1}^2 != -I")
            for b in range(a + 1, len(self.structures)):
                K = self.structures[b]
                if np.any(J @ K + K @ J):
                    problems.append(f"J{a + 1}, J{b + 1} do not anticommute")
        return problems

    def to_json(self) -> dict:
        return {"dim": self.dim, "structures": [J.reshape(-1).tolist() for J in self.structures]}

    @classmethod
    def from_json(cls, obj) -> "CliffordSystem":
        m = int(obj["dim"])
        mats = []
        for flat in obj["structures"]:
            arr = np.array(flat, dtype=np.int64)
            if arr.size != m * m:
                raise ValueError(f"structure has {arr.size} entries, expected {m * m}")
            mats.append(arr.reshape(m, m))
        return cls(m, tuple(mats))


_EPS = np.array([[0, -1], [1, 0]], dtype=np.int64)
_SIGMA = np.array([[1, 0], [0, -1]], dtype=np.int64)

# imaginary octonion units: e_i e_j = e_k along each oriented line of the Fano plane
_FANO = ((1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 7), (5, 6, 1), (6, 7, 2), (7, 1, 3))


def _octonion_left_mults() -> list:
    table = {}
    for i, j, k in _FANO:
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            table[(a, b)] = (1, c)
            table[(b, a)] = (-1, c)
    mats = []
    for i in range(1, 8):
        L = np.zeros((8, 8), dtype=np.int64)
        L[i, 0] = 1  # e_i * 1
        L[0, i] = -1  # e_i * e_i = -1
        for j in range(1, 8):
            if j != i:
                s, k = table[(i, j)]
                L[k, j] = s
        mats.append(L)
    return mats


def _quaternion_left_mults() -> list:
    # basis 1, i, j, k
    Li = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=np.int64)
    Lj = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=np.int64)
    return [Li, Lj, Li @ Lj]


def _double(structs: list, dim: int) -> list:
    """Cl_k on R^dim -> Cl_{k+1} on R^{2 dim}."""
    out = [np.kron(J, _SIGMA) for J in structs]
    out.append(np.kron(np.eye(dim, dtype=np.int64), _EPS))
    return out


def _periodic(structs: list) -> list:
    """Cl_k on W -> Cl_{k+8} on R^16 (x) W, via the volume element of Cl_8."""
    e8 = _power_of_two_system(4)
    omega = np.eye(16, dtype=np.int64)
    for E in e8:
        omega = omega @ E
    dim = structs[0].shape[0] if structs else 1
    out = [np.kron(E, np.eye(dim, dtype=np.int64)) for E in e8]
    out.extend(np.kron(omega, J) for J in structs)
    return out


@lru_cache(maxsize=None)
def _power_of_two_system_cached(a: int) -> tuple:
    if a == 0:
        return ()
    if a == 1:
        return (_EPS.copy(),)
    if a == 2:
        return tuple(_quaternion_left_mults())
    if a == 3:
        return tuple(_octonion_left_mults())
    if a == 4:
        return tuple(_double(_octonion_left_mults(), 8))
    return tuple(_periodic(list(_power_of_two_system_cached(a - 4))))


def _power_of_two_system(a: int) -> list:
    return [J.copy() for J in _power_of_two_system_cached(a)]


def clifford_system(m: int) -> CliffordSystem:
    """rho(m) - 1 anticommuting orthogonal complex structures on R^m, entries in {-1, 0, 1}."""
    if m < 1:
        raise ValueError("m must be positive")
    a = (m & -m).bit_length() - 1
    odd = m >> a
    base = _power_of_two_system(a)
    if odd > 1:
        eye = np.eye(odd, dtype=np.int64)
        base = [np.kron(eye, J) for J in base]
    for J in base:
        J.setflags(write=False)
    return CliffordSystem(m, tuple(base))


@dataclass(frozen=True, eq=False)
class NormedBilinear:
    """F : R^r x R^s -> R^t with F_k(x, y) = sum_{a,b} tensor[k][a][b] x_a y_b."""

    r: int
    s: int
    t: int
    tensor: tuple

    def __post_init__(self):
        tens = tuple(tuple(tuple(row) for row in mat) for mat in self.tensor)
        if len(tens) != self.t or any(len(m) != self.r for m in tens) or any(
            len(row) != self.s for m in tens for row in m
        ):
            raise ValueError(f"tensor must have shape {self.t} x {self.r} x {self.s}")
        object.__setattr__(self, "tensor", tens)

    def polys(self) -> list:
        """F_k as polynomials in the r + s variables (x_1..x_r, y_1..y_s)."""
        nv = self.r + self.s
        out = []
        for mat in self.tensor:
            terms = {}
            for a, row in enumerate(mat):
                for b, c in enumerate(row):
                    if c:
                        exps = [0] * nv
                        exps[a] += 1
                        exps[self.r + b] += 1
                        terms[tuple(exps)] = c
            out.append(MultiPoly(nv, terms))
        return out

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "t": self.t,
            "tensor": [[[format_coeff(c) for c in row] for row in m] for m in self.tensor],
        }

    @classmethod
    def from_json(cls, obj) -> "NormedBilinear":
        tens = [[[parse_coeff(c) for c in row] for row in m] for m in obj["tensor"]]
        return cls(int(obj["r"]), int(obj["s"]), int(obj["t"]), tens)


def normed_bilinear_from_clifford(cs: CliffordSystem) -> NormedBilinear:
    """F(x, y) = y_0 x + y_1 J_1 x + ... + y_k J_k x."""
    problems = cs.check()
    if problems:
        raise ValueError(f"invalid Clifford system: {problems[0]}")
    m = cs.dim
    mats = [np.eye(m, dtype=np.int64)] + list(cs.structures)
    s = len(mats)
    tensor = [[[int(mats[b][k, a]) for b in range(s)] for a in range(m)] for k in range(m)]
    return NormedBilinear(m, s, m, tensor)


def real_multiplication() -> NormedBilinear:
    return NormedBilinear(1, 1, 1, [[[1]]])


def complex_multiplication(conjugate_second: bool = False) -> NormedBilinear:
    """(x, y) -> x*y on C = R^2, or x * conj(y)."""
    s = -1 if conjugate_second else 1
    re = [[1, 0], [0, -s]]
    im = [[0, s], [1, 0]]
    return NormedBilinear(2, 2, 2, [re, im])


def verify_normed(F: NormedBilinear) -> bool:
    """|F(x,y)|^2 == |x|^2 |y|^2 as a polynomial identity."""
    nv = F.r + F.s
    polys = F.polys()
    lhs = sum_of_products(((p, p) for p in polys), nv)
    rhs = MultiPoly.norm_squared(nv, range(F.r)) * MultiPoly.norm_squared(nv, range(F.r, nv))
    return lhs == rhs


def hopf_construction(F: NormedBilinear, check: bool = True) -> SphereMap:
    """H(x, y) = (|x|^2 - |y|^2, 2 F(x, y)) : S^{r+s-1} -> S^t."""
    if check and not verify_normed(F):
        raise ValueError("bilinear map is not norm-multiplicative")
    nv = F.r + F.s
    first = MultiPoly.norm_squared(nv, range(F.r)) - MultiPoly.norm_squared(nv, range(F.r, nv))
    return SphereMap(nv - 1, F.t, [first] + [p * 2 for p in F.polys()])


def odd_sphere_fibration(k: int) -> SphereMap:
    """Quadratic S^{2k+1} -> S^{2k} from F(x, y) = y_1 x + y_2 J x on R^{2k} x R^2."""
    if k < 1:
        raise ValueError("k must be at least 1")
    r = 2 * k
    J = np.kron(np.eye(k, dtype=np.int64), _EPS)
    mats = [np.eye(r, dtype=np.int64), J]
    tensor = [[[int(mats[b][c, a]) for b in range(2)] for a in range(r)] for c in range(r)]
    return hopf_construction(NormedBilinear(r, 2, r, tensor))


@lru_cache(maxsize=None)
def clifford_hopf_map(m: int) -> SphereMap:
    """Hopf map S^{m + rho(m) - 1} -> S^m built from the Clifford system on R^m."""
    return hopf_construction(normed_bilinear_from_clifford(clifford_system(m)))


CHAINS = ("S31_to_S16", "S47_to_S32")


@lru_cache(maxsize=None)
def chain_witness(name: str) -> SphereMap:
    """Composite Hopf maps S^31 -> S^24 -> S^16 and S^47 -> S^40 -> S^41 -> S^32."""
    if name == "S31_to_S16":
        return compose(clifford_hopf_map(24), clifford_hopf_map(16))
    if name == "S47_to_S32":
        return compose(include_map(clifford_hopf_map(40)), clifford_hopf_map(32))
    raise ValueError(f"unknown chain {name!r}; expected one of {CHAINS}")
