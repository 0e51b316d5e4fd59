"""Rational self-maps of the polydisc and their slices.

A :class:`RationalMap` stores numerator and denominator as dense complex
coefficient grids indexed by multi-degree: ``num[a1, ..., an]`` multiplies
``z1**a1 * ... * zn**an``. Slices are produced by coefficient arithmetic,
not by sampling, so the resulting univariate maps can be fed to exact
root finding.
"""

from __future__ import annotations

import json
import string
from dataclasses import asdict, dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import CatalogError, DomainError, PoleError
from .numerics import circle_nodes, companion_roots, polyder, polymul, polyval, trim

MAX_DEGREE = 8
POLE_TOL = 1e-14
CATALOG_NAMES = ("coordinate", "product", "rational_example", "halfsum")


def _powers(x: np.ndarray, d: int) -> np.ndarray:
    return x[..., None] ** np.arange(d)


def _polyval_nd(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    n = c.ndim
    if n == 1:
        return polyval(c, z[..., 0])
    letters = string.ascii_lowercase[:n]
    operands = [_powers(z[..., j], c.shape[j]) for j in range(n)]
    spec = ",".join("..." + a for a in letters) + "," + letters + "->..."
    return np.einsum(spec, *operands, c)


class RationalMap:
    """Quotient of two polynomials in ``n`` complex variables."""

    def __init__(self, numerator, denominator=None, name: str | None = None):
        num = np.array(numerator, dtype=complex, ndmin=1)
        den = np.ones((1,) * num.ndim, dtype=complex) if denominator is None else np.array(denominator, dtype=complex, ndmin=1)
        if num.ndim != den.ndim:
            raise ValueError(f"numerator has {num.ndim} variables, denominator {den.ndim}")
        if max(num.shape + den.shape) > MAX_DEGREE + 1:
            raise ValueError(f"degree per variable is limited to {MAX_DEGREE}")
        if not np.any(den):
            raise PoleError("denominator vanishes identically")
        num.setflags(write=False)
        den.setflags(write=False)
        self.numerator = num
        self.denominator = den
        self.name = name

    @property
    def n(self) -> int:
        return self.numerator.ndim

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<RationalMap{label} n={self.n} num{self.numerator.shape} den{self.denominator.shape}>"

    def _points(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.n == 1 and (z.ndim == 0 or z.shape[-1] != 1):
            z = z[..., None]
        if z.shape[-1] != self.n:
            raise DomainError(f"expected points with {self.n} coordinates, got shape {z.shape}")
        return z

    def num_at(self, z) -> np.ndarray:
        return _polyval_nd(self.numerator, self._points(z))

    def den_at(self, z) -> np.ndarray:
        return _polyval_nd(self.denominator, self._points(z))

    def evaluate(self, z, on_pole: str = "raise") -> np.ndarray:
        """Evaluate at points whose last axis holds the coordinates.

        Univariate maps also accept plain scalars or arrays. With
        ``on_pole="nan"`` pole points yield NaN instead of raising.
        """
        p = self.num_at(z)
        q = self.den_at(z)
        bad = np.abs(q) < POLE_TOL
        if np.any(bad):
            if on_pole == "raise":
                raise PoleError("denominator vanishes at an evaluation point")
            q = np.where(bad, np.nan, q)
        with np.errstate(invalid="ignore"):
            return p / q

    __call__ = evaluate

    def depends_on(self) -> tuple[int, ...]:
        """Coordinates that appear with positive degree."""
        out = []
        for j in range(self.n):
            for c in (self.numerator, self.denominator):
                if c.shape[j] > 1 and np.any(np.take(c, np.arange(1, c.shape[j]), axis=j)):
                    out.append(j)
                    break
        return tuple(out)

    def restrict(self, j: int) -> "RationalMap":
        """The univariate map in coordinate ``j`` for a map depending on ``z_j`` only."""
        if set(self.depends_on()) - {j}:
            raise ValueError(f"map depends on coordinates other than {j}")
        take = lambda c: c[tuple(slice(None) if k == j else 0 for k in range(self.n))]
        return RationalMap(take(self.numerator), take(self.denominator), name=self.name)

    def derivative(self, j: int) -> "RationalMap":
        """Partial derivative in coordinate ``j`` via the quotient rule."""
        p, q = self.numerator, self.denominator
        top = _sub_grids(polymul(polyder(p, j), q), polymul(p, polyder(q, j)))
        return RationalMap(top, polymul(q, q))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.n,
            "numerator": _grid_to_dict(self.numerator),
            "denominator": _grid_to_dict(self.denominator),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RationalMap":
        num = _grid_from_dict(data["numerator"])
        den = _grid_from_dict(data["denominator"])
        if num.ndim != data.get("dimension", num.ndim):
            raise ValueError("dimension does not match coefficient grid")
        return cls(num, den, name=data.get("name"))

    # univariate helpers

    def is_constant(self) -> bool:
        if self.n != 1:
            return len(self.depends_on()) == 0
        s = simplify(self)
        return len(trim(s.numerator)) == 1 and len(trim(s.denominator)) == 1

    @cached_property
    def certificate(self) -> "InnerCertificate":
        return inner_certificate(self)

    @property
    def is_inner(self) -> bool:
        return self.certificate.is_inner


def _sub_grids(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    shape = tuple(max(x, y) for x, y in zip(a.shape, b.shape))
    out = np.zeros(shape, dtype=complex)
    out[tuple(slice(0, s) for s in a.shape)] += a
    out[tuple(slice(0, s) for s in b.shape)] -= b
    return out


def _grid_to_dict(c: np.ndarray) -> dict:
    flat = c.ravel(order="C")
    return {"shape": list(c.shape), "coefficients": [[float(v.real), float(v.imag)] for v in flat]}


def _grid_from_dict(d: dict) -> np.ndarray:
    pairs = np.asarray(d["coefficients"], dtype=float).reshape(-1, 2)
    return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(d["shape"], order="C")


def simplify(phi: RationalMap, tol: float = 1e-8) -> RationalMap:
    """Cancel numerically common roots of a univariate map."""
    if phi.n != 1:
        raise ValueError("simplify is univariate only")
    p = trim(phi.numerator)
    q = trim(phi.denominator)
    if not np.any(p):
        return RationalMap([0.0], [1.0], name=phi.name)
    rp = list(companion_roots(p))
    rq = list(companion_roots(q))
    cancelled = False
    for r in list(rp):
        if not rq:
            break
        dist = [abs(r - s) for s in rq]
        k = int(np.argmin(dist))
        if dist[k] <= tol * max(1.0, abs(r)):
            rp.remove(r)
            rq.pop(k)
            cancelled = True
    if not cancelled:
        return RationalMap(p, q, name=phi.name)
    num = p[-1] * np.polynomial.polynomial.polyfromroots(rp) if rp else p[-1:]
    den = q[-1] * np.polynomial.polynomial.polyfromroots(rq) if rq else q[-1:]
    return RationalMap(num, den, name=phi.name)


def catalog(name: str, n: int = 2) -> RationalMap:
    """Maps used throughout the examples.

    ``coordinate`` is ``z1`` on ``D^n`` (any ``n >= 1``); the other entries
    are bivariate.
    """
    if name == "coordinate":
        num = np.zeros((2,) + (1,) * (n - 1), dtype=complex)
        num[(1,) + (0,) * (n - 1)] = 1.0
        return RationalMap(num, np.ones((1,) * n), name=name)
    if n != 2:
        raise CatalogError(f"{name!r} is only defined for n = 2")
    if name == "product":
        return RationalMap([[0, 0], [0, 1]], [[1]], name=name)
    if name == "rational_example":
        return RationalMap([[0, 1], [1, 2]], [[2, 1], [1, 0]], name=name)
    if name == "halfsum":
        return RationalMap([[0, 0.5], [0.5, 0]], [[1]], name=name)
    raise CatalogError(f"unknown catalog map {name!r}; choose from {CATALOG_NAMES}")


def load_map(selector: str) -> RationalMap:
    """A catalog name or a path to a JSON coefficient file."""
    if selector in CATALOG_NAMES:
        return catalog(selector)
    path = Path(selector)
    if not path.exists():
        raise CatalogError(f"{selector!r} is neither a catalog name nor a file")
    return RationalMap.from_dict(json.loads(path.read_text()))


def diag_slice_coeffs(c: np.ndarray, zetas: np.ndarray) -> np.ndarray:
    """Coefficients in ``lambda`` of ``c(lambda * zeta)`` for each row of ``zetas``.

    Returns an ``(S, total_degree + 1)`` array.
    """
    c = np.asarray(c, dtype=complex)
    zetas = np.atleast_2d(np.asarray(zetas, dtype=complex))
    total = sum(s - 1 for s in c.shape)
    out = np.zeros((zetas.shape[0], total + 1), dtype=complex)
    for idx in zip(*np.nonzero(c)):
        mono = np.prod(zetas ** np.asarray(idx), axis=1)
        out[:, sum(idx)] += c[idx] * mono
    return out


def diag_slice(phi: RationalMap, zeta) -> RationalMap:
    """The univariate map ``lambda -> phi(lambda * zeta)``, common factors cancelled."""
    zeta = np.asarray(zeta, dtype=complex)
    if zeta.shape != (phi.n,):
        raise DomainError(f"direction must have {phi.n} coordinates")
    num = diag_slice_coeffs(phi.numerator, zeta)[0]
    den = diag_slice_coeffs(phi.denominator, zeta)[0]
    if not np.any(np.abs(den) > POLE_TOL):
        raise PoleError("slice denominator vanishes identically")
    return simplify(RationalMap(num, den, name=phi.name))


def freeze(c: np.ndarray, j: int, xi) -> np.ndarray:
    """Contract axis ``j`` of a coefficient grid with powers of ``xi``.

    ``xi`` may be an array; the result then has a leading axis over ``xi``.
    """
    c = np.asarray(c, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    pw = xi[..., None] ** np.arange(c.shape[j])
    return np.tensordot(pw, np.moveaxis(c, j, 0), axes=([-1], [0]))


def vertical_slice(phi: RationalMap, j: int, xi) -> RationalMap:
    """The univariate map in the other coordinate with ``z_j`` frozen at ``xi``."""
    if phi.n != 2:
        raise ValueError("vertical slices are defined for bivariate maps")
    if j not in (0, 1):
        raise ValueError("coordinate index must be 0 or 1")
    num = freeze(phi.numerator, j, xi)
    den = freeze(phi.denominator, j, xi)
    if not np.any(np.abs(den) > POLE_TOL):
        raise PoleError(f"frozen denominator vanishes identically at z_{j + 1} = {xi}")
    return simplify(RationalMap(num, den, name=phi.name))


def partial_derivative(phi: RationalMap, j: int, z) -> np.ndarray:
    """``d phi / d z_j`` at points of the closed polydisc (quotient rule)."""
    z = phi._points(z)
    q = phi.den_at(z)
    if np.any(np.abs(q) < POLE_TOL):
        raise PoleError("denominator vanishes at an evaluation point")
    p = phi.num_at(z)
    pj = _polyval_nd(polyder(phi.numerator, j), z)
    qj = _polyval_nd(polyder(phi.denominator, j), z)
    return (pj * q - p * qj) / q**2


@dataclass(frozen=True)
class InnerCertificate:
    """Numerical evidence that a map is inner.

    ``pole_points`` counts boundary grid points where the denominator
    vanished; they are excluded from the boundary maximum.
    """

    max_boundary_deviation: float
    max_interior_modulus: float
    grid_size: int
    pole_points: int
    tol: float

    @property
    def is_self_map(self) -> bool:
        return self.max_interior_modulus < 1.0

    @property
    def is_inner(self) -> bool:
        return self.is_self_map and self.max_boundary_deviation <= self.tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["is_inner"] = self.is_inner
        return d


def _torus_grid(n: int, size: int) -> np.ndarray:
    nodes = circle_nodes(size)
    mesh = np.meshgrid(*([nodes] * n), indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, n)


def inner_certificate(phi: RationalMap, grid_size: int = 64, tol: float = 1e-10) -> InnerCertificate:
    """Sample ``|phi|`` on a uniform boundary grid and at interior radii.

    Pole points on the boundary grid are counted, not raised.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    size = grid_size if phi.n <= 2 else min(grid_size, 24)
    pts = _torus_grid(phi.n, size)
    vals = phi.evaluate(pts, on_pole="nan")
    poles = int(np.count_nonzero(~np.isfinite(vals)))
    dev = np.abs(np.abs(vals[np.isfinite(vals)]) - 1.0)
    interior = 0.0
    for r in (0.5, 0.9, 0.99):
        interior = max(interior, float(np.max(np.abs(phi.evaluate(r * pts)))))
    return InnerCertificate(
        max_boundary_deviation=float(dev.max()) if dev.size else float("inf"),
        max_interior_modulus=interior,
        grid_size=size,
        pole_points=poles,
        tol=tol,
    )
