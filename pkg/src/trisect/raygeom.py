"""Complex-plane geometry: cube roots of unity, rays, sectors and triangles.

Everything here is described by half-plane constraints of the form
``Re(conj(n) * lam) > offset`` (or ``>=`` for closed regions) so that
membership on the rays separating sectors never depends on the branch cut
of ``arg``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SQRT3 = np.sqrt(3.0)
ZETA = (1.0 + 0.0j, complex(-0.5, SQRT3 / 2), complex(-0.5, -SQRT3 / 2))

# slack used when deciding whether a point sits on a ray
RAY_TOL = 1e-12


def zeta(k: int) -> complex:
    """Cube root of unity with index k in {1, 2, 3}."""
    if k not in (1, 2, 3):
        raise ValueError(f"cube-root index must be 1, 2 or 3, got {k!r}")
    return ZETA[k - 1]


def zeta_index(k: int) -> complex:
    """Like ``zeta`` but with the index reduced cyclically (0 means 3)."""
    return ZETA[(k - 1) % 3]


@dataclass(frozen=True)
class CubeRoot:
    k: int

    @property
    def value(self) -> complex:
        return zeta(self.k)


@dataclass(frozen=True)
class Ray:
    """Half-line from the origin.

    ``outgoing`` is {x*direction : x > 0}; the incoming ray on the same line is
    {x*direction : x < 0}, i.e. the outgoing ray with direction -direction.
    """

    direction: complex
    outgoing: bool = True

    @property
    def unit(self) -> complex:
        d = complex(self.direction) / abs(self.direction)
        return d if self.outgoing else -d

    def contains(self, lam: complex, tol: float = RAY_TOL) -> bool:
        lam = complex(lam)
        if lam == 0:
            return False
        u = self.unit
        w = np.conj(u) * lam
        return w.real > 0 and abs(w.imag) <= tol * max(1.0, abs(lam))

    def points(self, t):
        return np.asarray(t) * self.unit


def ray(k: int) -> Ray:
    """Outgoing ray in the direction of the k-th cube root."""
    return Ray(zeta(k), True)


def ray_hat(k: int) -> Ray:
    """Incoming ray on the line of the k-th cube root."""
    return Ray(zeta(k), False)


@dataclass(frozen=True)
class HalfPlane:
    normal: complex
    offset: float = 0.0

    def value(self, lam: complex) -> float:
        return (np.conj(self.normal) * lam).real - self.offset


@dataclass(frozen=True)
class Sector:
    """Union of open angular wedges plus a set of extra boundary rays.

    Each wedge is a pair of half-planes; a wedge must be narrower than pi.
    """

    name: str
    wedges: tuple = ()
    rays: tuple = field(default=())

    def contains(self, lam: complex) -> bool:
        lam = complex(lam)
        if lam == 0:
            return False
        for wedge in self.wedges:
            if all(h.value(lam) > 0 for h in wedge):
                return True
        return any(r.contains(lam) for r in self.rays)

    def rotated(self, w: complex, name: str | None = None) -> "Sector":
        """Image of the sector under multiplication by the unit w."""
        wedges = tuple(tuple(HalfPlane(h.normal * w, h.offset) for h in wedge)
                       for wedge in self.wedges)
        rays = tuple(Ray(r.unit * w, True) for r in self.rays)
        return Sector(name or self.name, wedges, rays)


def wedge(lo: float, hi: float) -> tuple:
    """Open wedge lo < arg < hi (angles in radians, hi - lo < pi)."""
    if not 0 < hi - lo < np.pi:
        raise ValueError("wedge must have opening in (0, pi)")
    return (HalfPlane(np.exp(1j * (lo + np.pi / 2))),
            HalfPlane(np.exp(1j * (hi - np.pi / 2))))


def sector_S(p: int) -> Sector:
    """Open sector (p-1)*pi/3 < arg z < p*pi/3, p = 1..6."""
    if p not in range(1, 7):
        raise ValueError("sector index must be in 1..6")
    return Sector(f"S{p}", (wedge((p - 1) * np.pi / 3, p * np.pi / 3),))


def sector_Si(p: int) -> Sector:
    """The sector S_p turned by -i (a quarter turn clockwise)."""
    return sector_S(p).rotated(-1j, f"S{p}(i)")


def omega(p: int, printed_omega3: bool = False) -> Sector:
    """The wedge Omega_p: two consecutive rotated sectors and the ray between.

    Omega_1, Omega_2 and Omega_3 are each other's images under lam -> lam*zeta_2.
    With ``printed_omega3`` the third region instead carries the outgoing ray
    -i*l_{zeta_2} (argument pi/6), which is not the ray separating its two
    sub-sectors; this variant exists only to test the two readings against each
    other.
    """
    if p == 1:
        return Sector("Omega1", sector_Si(1).wedges + sector_Si(2).wedges,
                      (Ray(-1j * -zeta(3)),))
    if p == 2:
        return Sector("Omega2", sector_Si(3).wedges + sector_Si(4).wedges,
                      (Ray(-1j * -zeta(1)),))
    if p == 3:
        extra = Ray(-1j * zeta(2)) if printed_omega3 else Ray(-1j * -zeta(2))
        return Sector("Omega3", sector_Si(5).wedges + sector_Si(6).wedges, (extra,))
    raise ValueError("Omega index must be 1, 2 or 3")


def omega_minus(p: int) -> Sector:
    s = omega(p)
    return s.rotated(-1.0, f"Omega{p}-")


def in_sector(lam: complex, s: Sector) -> bool:
    return s.contains(lam)


@dataclass(frozen=True)
class TriangleRegion:
    """Equilateral triangle T_a (or its mirror image T_a* when conjugate)."""

    a: float
    conjugate: bool = False

    def halfplanes(self):
        a = self.a
        hs = [HalfPlane(-1j, -a),
              HalfPlane(complex(-SQRT3 / 2, 0.5), -a),
              HalfPlane(complex(SQRT3 / 2, 0.5), -a)]
        if self.conjugate:
            hs = [HalfPlane(np.conj(h.normal), h.offset) for h in hs]
        return hs

    def contains(self, lam: complex, tol: float = 0.0) -> bool:
        lam = complex(lam)
        return all(h.value(lam) >= -tol for h in self.halfplanes())


def in_triangle(lam: complex, t: TriangleRegion, tol: float = 0.0) -> bool:
    if t.a < 0:
        raise ValueError("decay parameter must be non-negative")
    return t.contains(lam, tol)


def hexagon_vertices(a: float) -> np.ndarray:
    """Vertices of T_a intersected with T_a*: a regular hexagon of side 2a/sqrt(3)."""
    r = 2 * a / SQRT3
    return r * np.exp(1j * np.pi * np.arange(6) / 3)
