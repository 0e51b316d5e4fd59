"""Closed-form measures on the circle and the torus, and integration against them.

Every measure exposes ``rule(N)``, a node/weight pair ``(points, weights)``
with ``points`` of shape ``(P, n)``; integrals, Fourier coefficients and
Poisson or Cauchy transforms are all finite sums over such a rule.
Atomic parts are summed exactly. ``N`` controls the resolution of the
continuous parts.

Fourier convention: ``mu_hat(k) = integral of conj(zeta)**k d mu``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AliasingError, ResolutionError
from .kernels import as_disc, cauchy_product, poisson_kernel
from .numerics import TWO_PI, circle_nodes, gauss_legendre

DEFAULT_RADII = tuple(1.0 - 2.0**-j for j in range(4, 8))


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution settings shared by every integration routine.

    ``radii`` and ``extrapolation_order`` only matter for radial (weak-*)
    limits; ``extrapolation_order`` defaults to ``len(radii) - 1``.
    ``radial_nodes`` overrides the automatic grid ``ceil(8 / (1 - r))``.
    """

    nodes_per_dim: int = 512
    radii: tuple = DEFAULT_RADII
    extrapolation_order: int | None = None
    radial_nodes: tuple | None = None

    def __post_init__(self):
        if self.nodes_per_dim < 8:
            raise ValueError("nodes_per_dim must be at least 8")
        r = np.asarray(self.radii, dtype=float)
        if r.size and (np.any(r <= 0) or np.any(r >= 1) or np.any(np.diff(r) <= 0)):
            raise ValueError("radii must be strictly increasing in (0, 1)")
        object.__setattr__(self, "radii", tuple(float(x) for x in r))
        if self.extrapolation_order is not None and not 0 <= self.extrapolation_order < max(len(r), 1):
            raise ValueError("extrapolation order must be below the number of radii")
        if self.radial_nodes is not None:
            if len(self.radial_nodes) != len(r):
                raise ValueError("one radial grid size per radius")
            for n, rad in zip(self.radial_nodes, r):
                if n < 8.0 / (1.0 - rad):
                    raise ResolutionError(f"{n} nodes cannot resolve radius {rad}; need >= {8.0 / (1.0 - rad):.0f}")

    @property
    def order(self) -> int:
        return len(self.radii) - 1 if self.extrapolation_order is None else self.extrapolation_order

    def grid_for(self, i: int) -> int:
        if self.radial_nodes is not None:
            return int(self.radial_nodes[i])
        return int(np.ceil(8.0 / (1.0 - self.radii[i])))


DEFAULT_SPEC = QuadratureSpec()


def _spec(q) -> QuadratureSpec:
    if q is None:
        return DEFAULT_SPEC
    if isinstance(q, int):
        return QuadratureSpec(nodes_per_dim=q)
    return q


# circle measures


class CircleMeasure:
    """Measure on the unit circle."""

    def rule(self, N: int):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Lebesgue(CircleMeasure):
    """Normalized arc length (mass 1)."""

    def rule(self, N: int):
        return circle_nodes(N), np.full(N, 1.0 / N)

    def to_dict(self):
        return {"type": "lebesgue"}


@dataclass(frozen=True)
class Atom(CircleMeasure):
    position: complex
    weight: float = 1.0

    def rule(self, N: int):
        return np.array([complex(self.position)]), np.array([self.weight], dtype=complex)

    def to_dict(self):
        return {"type": "atom", "position": _cpair(self.position), "weight": _num(self.weight)}


@dataclass(frozen=True)
class AtomicSet(CircleMeasure):
    positions: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.positions) != len(self.weights):
            raise ValueError("positions and weights differ in length")

    def rule(self, N: int):
        return np.asarray(self.positions, dtype=complex), np.asarray(self.weights, dtype=complex)

    def to_dict(self):
        return {
            "type": "atomic_set",
            "positions": [_cpair(p) for p in self.positions],
            "weights": [_num(w) for w in self.weights],
        }


@dataclass(frozen=True)
class Density(CircleMeasure):
    """Absolutely continuous measure ``w(lambda) dm(lambda)``, trapezoid rule."""

    func: Callable
    label: str = "density"

    def rule(self, N: int):
        x = circle_nodes(N)
        return x, np.asarray(self.func(x), dtype=complex) / N

    def to_dict(self):
        x = circle_nodes(512)
        return {"type": "density", "label": self.label, "samples": _samples(x, self.func(x))}


@dataclass(frozen=True)
class Moments(CircleMeasure):
    """Real measure given by its Fourier coefficients ``mu_hat(k)``, ``k = 0..K-1``.

    Negative indices follow from ``mu_hat(-k) = conj(mu_hat(k))``. The rule
    samples the truncated Fourier series of the density on at least ``2K``
    nodes, which pairs trigonometric polynomials with the stored moments
    exactly.
    """

    coeffs: np.ndarray = field(compare=False)
    label: str = "moments"

    def density(self, x):
        c = np.asarray(self.coeffs, dtype=complex)
        x = np.asarray(x, dtype=complex)
        acc = np.zeros(x.shape, dtype=complex)
        for ck in c[:0:-1]:
            acc = (acc + ck) * x
        return (c[0].real + 2.0 * acc.real).astype(complex)

    def rule(self, N: int):
        M = max(N, 2 * len(self.coeffs))
        x = circle_nodes(M)
        K = len(self.coeffs)
        spec = np.zeros(M, dtype=complex)
        spec[0] = self.coeffs[0].real
        spec[1:K] = self.coeffs[1:]
        spec[M - K + 1 :] = np.conj(self.coeffs[1:][::-1])
        dens = np.fft.ifft(spec) * M  # sum_k c_k x**k
        return x, dens.real.astype(complex) / M

    def to_dict(self):
        return {"type": "moments", "label": self.label, "coefficients": [_cpair(c) for c in self.coeffs]}


# torus measures


class TorusMeasure:
    """Measure on ``T^n``; subclasses implement ``rule`` and ``to_dict``."""

    n: int

    def rule(self, N: int):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def has_abscont_part(self) -> bool:
        return False

    def declared_weights_nonnegative(self) -> bool:
        return True


def _tensor(points_list, weights_list):
    mesh = np.meshgrid(*points_list, indexing="ij")
    wmesh = np.meshgrid(*weights_list, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    w = np.prod(np.stack([m.ravel() for m in wmesh], axis=0), axis=0)
    return pts, w


@dataclass(frozen=True)
class Product(TorusMeasure):
    components: tuple

    @property
    def n(self):
        return len(self.components)

    def rule(self, N: int):
        rules = [c.rule(N) for c in self.components]
        return _tensor([r[0] for r in rules], [r[1] for r in rules])

    def to_dict(self):
        return {"type": "product", "components": [c.to_dict() for c in self.components]}

    def has_abscont_part(self):
        return sum(not isinstance(c, (Atom, AtomicSet)) for c in self.components) == self.n

    def declared_weights_nonnegative(self):
        for c in self.components:
            if isinstance(c, Atom) and not _nonneg(c.weight):
                return False
            if isinstance(c, AtomicSet) and not all(_nonneg(w) for w in c.weights):
                return False
        return True


@dataclass(frozen=True)
class Atomic(TorusMeasure):
    points: np.ndarray = field(compare=False)
    weights: np.ndarray = field(compare=False)

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=complex))
        w = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        if p.shape[0] != w.shape[0]:
            raise ValueError("points and weights differ in length")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return self.points.shape[1]

    def rule(self, N: int):
        return self.points, self.weights

    def to_dict(self):
        return {
            "type": "atomic",
            "points": [[_cpair(c) for c in p] for p in self.points],
            "weights": [_cpair(w) for w in self.weights],
        }

    def declared_weights_nonnegative(self):
        return all(_nonneg(w) for w in self.weights)


@dataclass(frozen=True)
class Sum(TorusMeasure):
    """``sum_i c_i mu_i`` with real coefficients."""

    terms: tuple  # of (coefficient, TorusMeasure)

    @property
    def n(self):
        return self.terms[0][1].n

    def rule(self, N: int):
        pts, ws = [], []
        for c, m in self.terms:
            p, w = m.rule(N)
            pts.append(p)
            ws.append(c * w)
        return np.concatenate(pts), np.concatenate(ws)

    def to_dict(self):
        return {"type": "sum", "terms": [{"coefficient": _num(c), "measure": m.to_dict()} for c, m in self.terms]}

    def has_abscont_part(self):
        return any(m.has_abscont_part() for _, m in self.terms)

    def declared_weights_nonnegative(self):
        return all(_nonneg(c) and m.declared_weights_nonnegative() for c, m in self.terms)


@dataclass(frozen=True)
class Pushforward(TorusMeasure):
    """Image of a circle measure under ``lambda -> lambda * direction``."""

    circle: CircleMeasure
    direction: tuple

    @property
    def n(self):
        return len(self.direction)

    def rule(self, N: int):
        x, w = self.circle.rule(N)
        return x[:, None] * np.asarray(self.direction, dtype=complex)[None, :], w

    def to_dict(self):
        return {"type": "pushforward", "direction": [_cpair(d) for d in self.direction], "circle": self.circle.to_dict()}

    def has_abscont_part(self):
        return False


def slice_rule(slice_moments: Callable, S: int, M: int):
    """Rule averaging slice measures over directions ``(1, t)``, ``t`` on ``S`` nodes.

    Each slice density is the truncated Fourier series of its first
    ``M // 2`` moments, sampled on ``M`` nodes.
    """
    K = M // 2
    t = circle_nodes(S)
    dirs = np.stack([np.ones(S, dtype=complex), t], axis=1)
    mom = np.asarray(slice_moments(dirs, K), dtype=complex)
    lam = circle_nodes(M)
    spec = np.zeros((S, M), dtype=complex)
    spec[:, 0] = mom[:, 0].real
    spec[:, 1:K] = mom[:, 1:K]
    spec[:, M - K + 1 :] = np.conj(mom[:, 1:K][:, ::-1])
    dens = np.fft.ifft(spec, axis=1).real * M  # sum_k c_k lam**k
    pts = np.stack([np.tile(lam, S), (t[:, None] * lam[None, :]).ravel()], axis=1)
    return pts, dens.ravel().astype(complex) / (M * S)


@dataclass(frozen=True)
class AbsCont(TorusMeasure):
    """Density on ``T^n``.

    With ``slice_moments`` (bivariate only) integration runs over diagonal
    slices ``lambda -> (lambda, lambda t)``: ``slice_moments(directions, K)``
    returns the first ``K`` Fourier coefficients of each slice measure, and
    the rule is built from ``N // 2`` slices of ``N`` nodes each, never fewer
    than 256 slices of 512 nodes: the slice moments of a map that nearly
    touches the circle decay slowly. Without it
    the density is sampled on the uniform tensor grid.
    """

    density: Callable
    n: int = 2
    label: str = "density"
    slice_moments: Callable | None = field(default=None, compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    MIN_SLICES = 256

    def rule(self, N: int):
        if N in self._cache:
            return self._cache[N]
        if self.slice_moments is None or self.n != 2:
            nodes = circle_nodes(N)
            pts, w = _tensor([nodes] * self.n, [np.full(N, 1.0 / N)] * self.n)
            out = pts, np.asarray(self.density(pts), dtype=complex) * w
        else:
            out = slice_rule(self.slice_moments, max(N // 2, self.MIN_SLICES), max(N, 2 * self.MIN_SLICES))
        self._cache[N] = out
        return out

    def to_dict(self):
        x = circle_nodes(64)
        pts, _ = _tensor([x] * self.n, [np.ones(64)] * self.n) if self.n <= 2 else (None, None)
        d = {"type": "abscont", "label": self.label, "dimension": self.n}
        if pts is not None:
            d["grid_size"] = 64
            d["samples"] = [_num(v) for v in np.asarray(self.density(pts)).real]
        return d

    def has_abscont_part(self):
        return True


@dataclass(frozen=True)
class Graph(TorusMeasure):
    """Mass on curves ``{(xi, eta_k(xi))}`` with weights ``w_k(xi) dm(xi)``.

    ``solve(xi)`` takes an array of unimodular parameters and returns
    ``(eta, weight)`` of shape ``(len(xi), K)``; missing branches carry
    weight 0. ``coordinate`` names the parameter coordinate (0 or 1).

    The rule is adaptive Gauss-Legendre in the angle of ``xi``: panels are
    bisected until moments ``xi^a eta^b`` of the weighted branches agree
    between a panel and its two halves. This resolves weights that concentrate in
    narrow spikes.
    """

    solve: Callable = field(compare=False)
    coordinate: int = 0
    label: str = "graph"
    tol: float = 1e-13
    floor: float = 1e-16
    noise: float = 1e-9
    max_depth: int = 48
    max_panels: int = 20000
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    n = 2
    GL_ORDER = 16

    def _panel_eval(self, a, b):
        th, gw = gauss_legendre(a, b, self.GL_ORDER)
        xi = np.exp(1j * th.ravel())
        eta, wt = self.solve(xi)
        eta = np.asarray(eta).reshape(len(a), self.GL_ORDER, -1)
        wt = np.asarray(wt, dtype=float).reshape(len(a), self.GL_ORDER, -1) * (gw / TWO_PI)[:, :, None]
        return xi.reshape(len(a), self.GL_ORDER), eta, wt

    XI_BAND = 4
    ETA_BAND = 32

    @classmethod
    def _moments(cls, xi, eta, wt):
        """Moments ``xi^a eta^b`` for ``|a| <= 4``, ``|b| <= 32``, one row per panel."""
        ea = np.where(wt > 0, eta, 1.0)
        xa = xi[..., None] ** np.arange(-cls.XI_BAND, cls.XI_BAND + 1)
        eb = ea[..., None] ** np.arange(-cls.ETA_BAND, cls.ETA_BAND + 1)
        return np.einsum("pga,pgkb->pab", xa, wt[..., None] * eb).reshape(xi.shape[0], -1)

    def _adaptive(self, N: int):
        P0 = max(8, N // 4)
        edges = np.linspace(0.0, TWO_PI, P0 + 1)
        a, b = edges[:-1], edges[1:]
        done = []
        whole = self._panel_eval(a, b)
        stats = {"panels": 0, "unconverged": 0}
        for depth in range(self.max_depth + 1):
            if len(a) == 0:
                break
            m = (a + b) / 2
            left = self._panel_eval(a, m)
            right = self._panel_eval(m, b)
            mw = self._moments(*whole)
            mh = self._moments(*left) + self._moments(*right)
            err = np.max(np.abs(mw - mh), axis=1)
            mass = np.abs(mh[:, self.XI_BAND * (2 * self.ETA_BAND + 1) + self.ETA_BAND])
            width = b - a
            # weights evaluated near common zeros of numerator and denominator
            # carry relative cancellation noise; do not chase it
            ok = err <= self.tol * width / TWO_PI + self.floor + self.noise * mass
            if depth == self.max_depth or len(a) > self.max_panels:
                stats["unconverged"] += int(np.count_nonzero(~ok))
                ok[:] = True
            for idx in np.nonzero(ok)[0]:
                done.append(tuple(x[idx] for x in left) + (0,))
                done.append(tuple(x[idx] for x in right) + (0,))
            keep = ~ok
            a = np.concatenate([a[keep], m[keep]])
            b2 = np.concatenate([m[keep], b[keep]])
            whole = tuple(np.concatenate([l[keep], r[keep]]) for l, r in zip(left, right))
            b = b2
        stats["panels"] = len(done)
        self._cache["stats"] = stats
        xi = np.concatenate([d[0] for d in done])
        eta = np.concatenate([d[1] for d in done])
        wt = np.concatenate([d[2] for d in done])
        K = eta.shape[-1]
        xi_b = np.repeat(xi.ravel(), K)
        eta_b = eta.reshape(-1)
        w_b = wt.reshape(-1)
        keep = w_b > 0
        xi_b, eta_b, w_b = xi_b[keep], eta_b[keep], w_b[keep]
        pts = np.stack([xi_b, eta_b], axis=1) if self.coordinate == 0 else np.stack([eta_b, xi_b], axis=1)
        return pts, w_b.astype(complex)

    def rule(self, N: int):
        if N not in self._cache:
            self._cache[N] = self._adaptive(N)
        return self._cache[N]

    @property
    def stats(self):
        """Panel count and unconverged panels of the last adaptive rule."""
        return self._cache.get("stats")

    def table(self, rows: int = 512):
        """Uniform samples ``(angle, branch, eta angle, weight)``."""
        xi = circle_nodes(rows)
        eta, wt = self.solve(xi)
        eta = np.asarray(eta)
        wt = np.asarray(wt, dtype=float)
        out = []
        for i in range(rows):
            for k in range(eta.shape[1]):
                if wt[i, k] > 0 or np.isfinite(eta[i, k]):
                    out.append((float(np.angle(xi[i]) % TWO_PI), k, float(np.angle(eta[i, k]) % TWO_PI) if np.isfinite(eta[i, k]) else float("nan"), float(wt[i, k])))
        return out

    def to_dict(self):
        return {
            "type": "graph",
            "label": self.label,
            "coordinate": self.coordinate,
            "table": [list(r) for r in self.table()],
        }


# integration


def _apply(f, pts: np.ndarray) -> np.ndarray:
    if not callable(f):
        return np.full(pts.shape[0], complex(f))
    v = np.asarray(f(pts), dtype=complex)
    if v.ndim == 0:
        v = np.full(pts.shape[0], v)
    return v


def quadrature_rule(mu: TorusMeasure, q=None):
    return mu.rule(_spec(q).nodes_per_dim)


def integrate(mu: TorusMeasure, f, q=None) -> complex:
    """``integral f d mu``; ``f`` maps ``(P, n)`` point arrays to ``(P,)`` values."""
    pts, w = quadrature_rule(mu, q)
    if pts.shape[0] == 0:
        return 0j
    return complex(np.sum(_apply(f, pts) * w))


def integrate_many(mu: TorusMeasure, fs: Sequence, q=None) -> np.ndarray:
    pts, w = quadrature_rule(mu, q)
    return np.array([np.sum(_apply(f, pts) * w) for f in fs])


def total_mass(mu: TorusMeasure, q=None) -> float:
    if not mu.declared_weights_nonnegative():
        raise ValueError("total_mass needs a positive measure; negative or complex weights found")
    return float(integrate(mu, 1.0, q).real)


def character(k) -> Callable:
    """``zeta -> conj(zeta)**k`` for an integer multi-index ``k``."""
    k = np.asarray(k, dtype=int)
    return lambda z: np.prod(np.asarray(z) ** (-k), axis=-1)


def _check_alias(k, q):
    N = _spec(q).nodes_per_dim
    if np.any(np.abs(np.asarray(k)) > N // 2 - 1):
        raise AliasingError(f"index {k} exceeds the resolvable range |k_j| <= {N // 2 - 1}")


def fourier_coeff(mu: TorusMeasure, k, q=None) -> complex:
    _check_alias(k, q)
    return integrate(mu, character(k), q)


def fourier_grid(mu: TorusMeasure, maxdeg: int, q=None) -> np.ndarray:
    """All coefficients with ``|k_j| <= maxdeg`` for a bivariate measure.

    Entry ``[k1 + maxdeg, k2 + maxdeg]`` holds ``mu_hat(k1, k2)``.
    """
    _check_alias([maxdeg] * mu.n, q)
    pts, w = quadrature_rule(mu, q)
    ks = np.arange(-maxdeg, maxdeg + 1)
    if mu.n != 2:
        raise ValueError("fourier_grid is bivariate")
    e1 = pts[:, 0:1] ** (-ks)
    e2 = pts[:, 1:2] ** (-ks)
    return e1.T @ (w[:, None] * e2)


def pluriharmonic_support_check(mu: TorusMeasure, maxdeg: int = 8, tol: float = 1e-8, q=None):
    """True iff every mixed-sign coefficient with ``|k_j| <= maxdeg`` is below ``tol``.

    Returns ``(ok, offending)`` with ``offending`` a list of ``(k, |mu_hat(k)|)``.
    """
    offending = []
    if mu.n == 2:
        grid = fourier_grid(mu, maxdeg, q)
        ks = np.arange(-maxdeg, maxdeg + 1)
        for i, k1 in enumerate(ks):
            for j, k2 in enumerate(ks):
                if k1 * k2 < 0 and abs(grid[i, j]) > tol:
                    offending.append(((int(k1), int(k2)), float(abs(grid[i, j]))))
    else:
        for k in itertools.product(range(-maxdeg, maxdeg + 1), repeat=mu.n):
            if any(x > 0 for x in k) and any(x < 0 for x in k):
                v = abs(fourier_coeff(mu, k, q))
                if v > tol:
                    offending.append((k, float(v)))
    return not offending, offending


def poisson_integral(mu: TorusMeasure, z, q=None) -> float:
    z = as_disc(z)
    return float(integrate(mu, lambda p: poisson_kernel(z, p), q).real)


def poisson_panel(mu: TorusMeasure, zs, q=None) -> np.ndarray:
    """Poisson integrals at several points sharing one rule."""
    pts, w = quadrature_rule(mu, q)
    return np.array([np.sum(poisson_kernel(as_disc(z), pts) * w).real for z in zs])


def cauchy_transform(mu: TorusMeasure, z, q=None) -> complex:
    """``mu_+(z) = integral C(z, zeta) d mu(zeta)``."""
    z = as_disc(z)
    return integrate(mu, lambda p: cauchy_product(z, p), q)


# serialization


def _num(x):
    x = complex(x)
    return x.real if x.imag == 0 else [x.real, x.imag]


def _cpair(x):
    x = complex(x)
    return [x.real, x.imag]


def _nonneg(w) -> bool:
    w = complex(w)
    return w.imag == 0 and w.real >= 0


def _samples(x, v):
    return [[float(np.angle(a) % TWO_PI), float(np.real(b))] for a, b in zip(x, np.asarray(v))]


def measure_to_json(mu: TorusMeasure) -> str:
    return json.dumps(mu.to_dict(), sort_keys=True)


def circle_from_dict(d: dict) -> CircleMeasure:
    t = d["type"]
    if t == "lebesgue":
        return Lebesgue()
    if t == "atom":
        return Atom(complex(*d["position"]), d["weight"])
    if t == "atomic_set":
        return AtomicSet(tuple(complex(*p) for p in d["positions"]), tuple(d["weights"]))
    if t == "moments":
        return Moments(np.array([complex(*c) for c in d["coefficients"]]), d.get("label", "moments"))
    raise ValueError(f"circle measure type {t!r} cannot be rebuilt from JSON")


def measure_from_dict(d: dict) -> TorusMeasure:
    """Rebuild closed-form measures; sampled variants (graph, density) are export only."""
    t = d["type"]
    if t == "product":
        return Product(tuple(circle_from_dict(c) for c in d["components"]))
    if t == "atomic":
        return Atomic(
            np.array([[complex(*c) for c in p] for p in d["points"]]),
            np.array([complex(*w) for w in d["weights"]]),
        )
    if t == "sum":
        return Sum(tuple((term["coefficient"], measure_from_dict(term["measure"])) for term in d["terms"]))
    if t == "pushforward":
        return Pushforward(circle_from_dict(d["circle"]), tuple(complex(*c) for c in d["direction"]))
    raise ValueError(f"measure type {t!r} cannot be rebuilt from JSON")


def graph_csv(mu: Graph, rows: int = 512) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["angle", "branch", "eta_angle", "weight"])
    for a, k, e, wt in mu.table(rows):
        w.writerow([f"{a:.17g}", k, f"{e:.17g}", f"{wt:.17g}"])
    return buf.getvalue()
