"""Harmonic decomposition of polynomials and Fourier degree on spheres."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .poly_core import MultiPoly, SphereContext, nf_reduce
from .sphere_maps import MatrixPolyMap, ProjectorMap, SphereMap

__all__ = [
    "HarmonicDecomposition",
    "laplacian",
    "harmonic_part",
    "harmonic_decompose",
    "spherical_components",
    "fourier_degree",
    "map_fourier_degree",
]


def laplacian(p: MultiPoly) -> MultiPoly:
    """Flat Laplacian: sum of second partials."""
    out = MultiPoly.zero(p.nvars)
    for i in range(p.nvars):
        out = out + p.derivative(i).derivative(i)
    return out


@dataclass(frozen=True)
class HarmonicDecomposition:
    """p = sum_k |v|^{2k} h_k with each h_k harmonic homogeneous of degree d - 2k."""

    degree: int
    components: tuple  # ((k, h_k), ...), zero components omitted

    def reconstruct(self, nvars: int) -> MultiPoly:
        r2 = MultiPoly.norm_squared(nvars)
        out = MultiPoly.zero(nvars)
        for k, h in self.components:
            out = out + (r2**k) * h
        return out


def harmonic_part(p: MultiPoly) -> MultiPoly:
    """Harmonic projection of a homogeneous polynomial of degree d in m variables.

    h = sum_j a_j |v|^{2j} Lap^j p with a_0 = 1 and
    a_{j+1} = -a_j / (2 (j+1) (m + 2d - 2j - 4)), which makes Lap h = 0 and
    p - h divisible by |v|^2.
    """
    h, _ = _split(p)
    return h


def _split(p: MultiPoly) -> tuple:
    """(h, q) with p = h + |v|^2 q, h harmonic; p homogeneous."""
    m = p.nvars
    d = p.degree()
    if d < 2:
        return p, MultiPoly.zero(m)
    r2 = MultiPoly.norm_squared(m)
    a = Fraction(1)
    lap = p
    h = p
    q = MultiPoly.zero(m)
    r2pow = MultiPoly.constant(m, 1)  # |v|^{2j-2}
    for j in range(0, d // 2):
        lap = laplacian(lap)
        if lap.is_zero():
            break
        a = -a / (2 * (j + 1) * (m + 2 * d - 2 * j - 4))
        term = r2pow * lap * a
        q = q - term
        r2pow = r2pow * r2
    h = p - r2 * q
    return h, q


def harmonic_decompose(p: MultiPoly) -> HarmonicDecomposition:
    """Unique decomposition of a homogeneous p into |v|^{2k}-weighted harmonics."""
    if not p.is_homogeneous():
        raise ValueError("harmonic_decompose needs a homogeneous polynomial")
    d = max(p.degree(), 0)
    comps = []
    k = 0
    rest = p
    while not rest.is_zero():
        h, rest = _split(rest)
        if not h.is_zero():
            comps.append((k, h))
        k += 1
    return HarmonicDecomposition(d, tuple(comps))


def spherical_components(p: MultiPoly, ctx: SphereContext) -> dict:
    """{k: harmonic polynomial} whose restrictions are the Omega_k parts of p on the sphere."""
    nf = nf_reduce(p, ctx)
    comps: dict = {}
    for d, part in nf.homogeneous_parts().items():
        for k, h in harmonic_decompose(part).components:
            e = d - 2 * k
            comps[e] = comps.get(e, MultiPoly.zero(ctx.nvars)) + h
    return {e: h for e, h in sorted(comps.items()) if not h.is_zero()}


def fourier_degree(p: MultiPoly, ctx: SphereContext) -> int:
    """Largest k with a nonzero Omega_k component; 0 for constants (and for 0)."""
    comps = spherical_components(p, ctx)
    return max(comps, default=0)


def map_fourier_degree(F) -> int:
    if isinstance(F, SphereMap):
        polys = F.coords
    elif isinstance(F, (MatrixPolyMap, ProjectorMap)):
        polys = [e for row in F.entries for e in row]
    else:
        raise TypeError(f"unsupported map type {type(F).__name__}")
    ctx = F.ctx
    return max((fourier_degree(c, ctx) for c in polys), default=0)
