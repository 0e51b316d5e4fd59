"""Clark measures of holomorphic self-maps of the polydisc.

For unimodular ``alpha`` the Clark measure of ``phi`` is the positive
measure whose Poisson integral is ``(1 - |phi|^2) / |alpha - phi|^2``.
:func:`construct_clark` picks a closed-form representation when the
structure of ``phi`` allows one and always certifies the result against
that defining property on a fixed panel of interior points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import measures as M
from .errors import ClarkError, DegenerateSliceError, ResolutionError, RootFindingError, SingularityError
from .inner_functions import (
    POLE_TOL,
    RationalMap,
    diag_slice,
    diag_slice_coeffs,
    freeze,
    simplify,
    vertical_slice,
)
from .kernels import RENORMALIZE_TOL, as_disc
from .numerics import batched_roots, circle_nodes, companion_roots, polyval, richardson, series_div, trim

ACCEPT_TOL = 1e-6
UNIMODULAR_TOL = 1e-6
MASS_TOL = 1e-8
PANEL_RADII = (0.1, 0.3, 0.5, 0.7, 0.9)


def z_panel(n: int = 2) -> np.ndarray:
    """Fixed 25-point panel ``(a e^{i pi p/4}, b e^{i pi q/4})`` (bivariate).

    For other ``n`` the same radii and angles are used on the first two
    coordinates and the rest are set to ``0.25``.
    """
    pts = []
    for p in range(5):
        for q in range(5):
            z = [PANEL_RADII[p] * np.exp(1j * np.pi * p / 4), PANEL_RADII[q] * np.exp(1j * np.pi * q / 4)]
            pts.append((z + [0.25] * max(n - 2, 0))[:n] if n >= 2 else [z[0]])
    return np.array(pts, dtype=complex)


def unimodular(alpha) -> complex:
    """Renormalize ``alpha`` to the unit circle (deviation up to 1e-8 tolerated)."""
    a = complex(alpha)
    if abs(abs(a) - 1.0) > RENORMALIZE_TOL:
        raise ValueError(f"alpha = {a} is not unimodular")
    return a / abs(a)


def clark_symbol(phi: RationalMap, alpha, z) -> np.ndarray:
    """``(1 - |phi(z)|^2) / |alpha - phi(z)|^2``, the Poisson integral of the Clark measure."""
    alpha = unimodular(alpha)
    v = phi(as_disc(z))
    gap = np.abs(alpha - v)
    if np.any(gap < POLE_TOL):
        raise SingularityError("phi(z) equals alpha")
    a = (1.0 - np.abs(v) ** 2) / gap**2
    b = ((alpha + v) / (alpha - v)).real
    if not np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.max(np.abs(a), initial=1.0)):
        raise ClarkError("the two forms of the Clark symbol disagree")
    return a


def herglotz_moments(num: np.ndarray, den: np.ndarray, alpha: complex, K: int) -> np.ndarray:
    """Fourier coefficients ``k = 0..K-1`` of the Clark measures of univariate maps.

    Rows of ``num``/``den`` are coefficient lists of ``p`` and ``q``. The
    coefficients are read off the Taylor series of ``(alpha q + p) / (alpha q - p)``:
    half of each coefficient for ``k > 0``, the real part for ``k = 0``.
    """
    num = np.atleast_2d(num)
    den = np.atleast_2d(den)
    w = max(num.shape[1], den.shape[1])
    p = np.zeros((num.shape[0], w), dtype=complex)
    q = np.zeros((den.shape[0], w), dtype=complex)
    p[:, : num.shape[1]] = num
    q[:, : den.shape[1]] = den
    H = series_div(alpha * q + p, alpha * q - p, K)
    out = H / 2
    out[:, 0] = H[:, 0].real
    return out


def _univariate_clark(B: RationalMap, alpha: complex, K: int = 512) -> M.CircleMeasure:
    """Atoms for an inner univariate map, moments otherwise, scaled Lebesgue if constant."""
    B = simplify(B)
    if B.is_constant():
        c = B.numerator[0] / B.denominator[0]
        return M.Density(lambda x, s=(1 - abs(c) ** 2) / abs(alpha - c) ** 2: np.full(np.shape(x), s), "constant")
    if B.is_inner:
        return clark_1d(B, alpha)
    return M.Moments(herglotz_moments(B.numerator, B.denominator, alpha, K)[0], "herglotz")


def clark_1d(B: RationalMap, alpha) -> M.AtomicSet:
    """Clark measure of a finite Blaschke product: atoms at ``B = alpha`` with weights ``1/|B'|``."""
    alpha = unimodular(alpha)
    B = simplify(B)
    if B.n != 1:
        raise ValueError("clark_1d takes a univariate map")
    p, q = trim(B.numerator), trim(B.denominator)
    if len(p) == 1 and len(q) == 1:
        raise DegenerateSliceError("constant map has no one-dimensional Clark measure")
    w = max(len(p), len(q))
    pp = np.zeros(w, dtype=complex)
    qq = np.zeros(w, dtype=complex)
    pp[: len(p)] = p
    qq[: len(q)] = q
    roots = companion_roots(pp - alpha * qq)
    off = np.abs(np.abs(roots) - 1.0)
    if roots.size == 0 or np.any(off > UNIMODULAR_TOL):
        raise RootFindingError(f"roots of B = alpha off the circle by up to {off.max() if off.size else np.inf:.3g}")
    roots = roots / np.abs(roots)
    dp = np.polynomial.polynomial.polyder(p) if len(p) > 1 else np.zeros(1)
    dq = np.polynomial.polynomial.polyder(q) if len(q) > 1 else np.zeros(1)
    qv = polyval(q, roots)
    deriv = (polyval(dp, roots) * qv - polyval(p, roots) * polyval(dq, roots)) / qv**2
    weights = 1.0 / np.abs(deriv)
    b0 = p[0] / q[0]
    expected = (1 - abs(b0) ** 2) / abs(alpha - b0) ** 2
    if abs(weights.sum() - expected) > MASS_TOL * max(1.0, expected):
        raise RootFindingError(f"atom masses sum to {weights.sum()} instead of {expected}")
    order = np.argsort(np.angle(roots) % (2 * np.pi))
    return M.AtomicSet(tuple(complex(r) for r in roots[order]), tuple(float(x) for x in weights[order]))


class BranchSolver:
    """Unimodular solutions ``eta`` of ``phi(xi, eta) = alpha`` with weights ``1/|d phi/d eta|``.

    Works in the coordinate opposite to ``coordinate``; roots shared with the
    denominator (where ``phi`` is 0/0) and roots off the circle get weight 0.
    """

    def __init__(self, phi: RationalMap, alpha: complex, coordinate: int = 0):
        self.phi = phi
        self.alpha = alpha
        self.coordinate = coordinate
        p, q = phi.numerator, phi.denominator
        shape = tuple(max(a, b) for a, b in zip(p.shape, q.shape))
        self.p = np.zeros(shape, dtype=complex)
        self.q = np.zeros(shape, dtype=complex)
        self.p[tuple(slice(0, s) for s in p.shape)] = p
        self.q[tuple(slice(0, s) for s in q.shape)] = q
        self.R = self.p - alpha * self.q
        self.qnorm = np.abs(self.q).sum()
        self.off_circle = 0

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=complex)
        j = self.coordinate
        rows = freeze(self.R, j, xi)
        pr = freeze(self.p, j, xi)
        qr = freeze(self.q, j, xi)
        K = rows.shape[1] - 1
        eta = np.full((xi.size, K), np.nan + 0j)
        for i, r in enumerate(batched_roots(rows)):
            eta[i, : r.size] = r
        ok = np.isfinite(eta) & (np.abs(np.abs(eta) - 1.0) <= UNIMODULAR_TOL)
        self.off_circle += int(np.count_nonzero(np.isfinite(eta) & ~ok))
        e = np.where(ok, eta / np.where(ok, np.abs(eta), 1.0), 1.0)
        qv = _rowval(qr, e)
        pv = _rowval(pr, e)
        dp = _rowval(_rowder(pr), e)
        dq = _rowval(_rowder(qr), e)
        top = np.abs(qv) ** 2
        bottom = np.abs(dp * qv - pv * dq)
        ok &= np.abs(qv) > 1e-12 * self.qnorm
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(ok & (bottom > 0), top / bottom, 0.0)
        return np.where(ok, e, np.nan), w


def _rowval(rows, x):
    acc = np.zeros(x.shape, dtype=complex)
    for k in range(rows.shape[1] - 1, -1, -1):
        acc = acc * x + rows[:, k : k + 1]
    return acc


def _rowder(rows):
    if rows.shape[1] == 1:
        return np.zeros_like(rows)
    return rows[:, 1:] * np.arange(1, rows.shape[1])


@dataclass
class BranchTable:
    """Branches sampled on a uniform grid and tracked continuously."""

    xi: np.ndarray
    eta: np.ndarray
    weight: np.ndarray
    discontinuities: list
    collisions: list

    def rows(self):
        out = []
        for i in range(self.xi.size):
            for k in range(self.eta.shape[1]):
                if np.isfinite(self.eta[i, k]):
                    out.append((float(np.angle(self.xi[i]) % (2 * np.pi)), k, float(np.angle(self.eta[i, k]) % (2 * np.pi)), float(self.weight[i, k])))
        return out


def _circ(a, b):
    d = np.abs(np.angle(a * np.conj(b)))
    return np.where(np.isfinite(d), d, np.inf)


def track_branches(xi, eta, weight, collision_tol: float = 1e-6) -> BranchTable:
    """Sort roots at the first sample, then match step to step by circular distance."""
    eta = eta.copy()
    weight = weight.copy()
    N, K = eta.shape
    spacing = 2 * np.pi / N
    order = np.argsort(np.where(np.isfinite(eta[0]), np.angle(eta[0]) % (2 * np.pi), np.inf))
    eta[0], weight[0] = eta[0, order], weight[0, order]
    disc, coll = [], []

    def touching(row, i):
        f = row[np.isfinite(row)]
        if any(abs(f[a] - f[b]) < collision_tol for a, b in itertools.combinations(range(f.size), 2)):
            coll.append(i)

    touching(eta[0], 0)
    perms = list(itertools.permutations(range(K))) if K <= 5 else None
    for i in range(1, N):
        prev = eta[i - 1]
        if perms is not None:
            best = min(perms, key=lambda pm: np.sum(np.minimum(_circ(eta[i, list(pm)], prev), 10.0)))
        else:
            best, free = [], list(range(K))
            for k in range(K):
                j = min(free, key=lambda c: float(_circ(eta[i, c], prev[k])))
                best.append(j)
                free.remove(j)
        eta[i], weight[i] = eta[i, list(best)], weight[i, list(best)]
        step = _circ(eta[i], prev)
        if np.any(np.isfinite(eta[i]) & np.isfinite(prev) & (step > 10 * spacing)):
            disc.append(i)
        touching(eta[i], i)
    return BranchTable(xi, eta, weight, disc, coll)


def clark_graph_2d(phi: RationalMap, alpha, N: int = 512, coordinate: int = 0):
    """Graph measure of solutions of ``phi = alpha`` over the parameter coordinate.

    Returns the :class:`~clarktorus.measures.Graph` measure and a tracked
    :class:`BranchTable` sampled at ``N`` uniform parameter values.
    """
    alpha = unimodular(alpha)
    if phi.n != 2:
        raise ValueError("graph construction is bivariate")
    solver = BranchSolver(phi, alpha, coordinate)
    graph = M.Graph(solver, coordinate=coordinate, label=f"{phi.name or 'phi'} = alpha")
    xi = circle_nodes(N)
    eta, w = solver(xi)
    return graph, track_branches(xi, eta, w)


def line_components(phi: RationalMap, alpha, coordinate: int = 0) -> list:
    """Circles ``{z_j = xi0}`` (``j = coordinate``) on which ``phi`` is identically ``alpha``.

    Circles in the other direction are already branches of the graph
    measure parameterized by ``z_j``. Each circle found here carries ``delta_{xi0}`` times the density ``1/|d phi/d z_j|`` in the
    other coordinate, the limit of the graph weights as branches flatten
    onto the circle.
    """
    alpha = unimodular(alpha)
    out = []
    solver = BranchSolver(phi, alpha)
    R = solver.R
    for j in (coordinate,):
        cols = np.moveaxis(R, j, 0)  # cols[a, b]: coefficient of z_j^a z_other^b
        polys = [trim(cols[:, b]) for b in range(cols.shape[1]) if np.any(np.abs(cols[:, b]) > 1e-14)]
        if not polys:
            continue
        base = min(polys, key=len)
        for x in companion_roots(base):
            if abs(abs(x) - 1.0) > UNIMODULAR_TOL:
                continue
            x = x / abs(x)
            if all(abs(polyval(c, x)) <= 1e-9 * np.abs(c).sum() for c in polys):
                d = phi.derivative(j)
                D = vertical_slice(d, j, x)
                dens = (lambda D: lambda eta: 1.0 / np.abs(D.evaluate(eta, on_pole="nan")))(D)
                comps = [M.Atom(complex(x), 1.0), M.Density(dens, "line")]
                out.append(M.Product(tuple(comps if j == 0 else comps[::-1])))
    return out


@dataclass(frozen=True)
class RadialApproximant:
    """The smooth density ``u_r(zeta) = (1 - |phi(r zeta)|^2) / |alpha - phi(r zeta)|^2``."""

    phi: RationalMap
    alpha: complex
    r: float

    def density(self, pts) -> np.ndarray:
        v = self.phi(self.r * np.asarray(pts, dtype=complex))
        return (1.0 - np.abs(v) ** 2) / np.abs(self.alpha - v) ** 2


def _lagrange_at_zero(h: np.ndarray) -> np.ndarray:
    c = np.ones(h.size)
    for j in range(h.size):
        for i in range(h.size):
            if i != j:
                c[j] *= h[i] / (h[i] - h[j])
    return c


@dataclass(frozen=True)
class RadialMeasure(M.TorusMeasure):
    """Weak-* limit of ``u_r dm`` extrapolated in ``1 - r``.

    The rule is the union of the tensor grids for the radii in ``spec``
    weighted by the Lagrange coefficients of the extrapolation.
    """

    phi: RationalMap
    alpha: complex
    spec: M.QuadratureSpec = M.DEFAULT_SPEC
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self):
        return self.phi.n

    def rule(self, N: int):
        if "rule" not in self._cache:
            s = self.spec
            h = 1.0 - np.asarray(s.radii)
            idx = np.argsort(h)[: s.order + 1]
            coef = _lagrange_at_zero(h[idx])
            pts, ws = [], []
            for c, i in zip(coef, idx):
                g = s.grid_for(i)
                nodes = circle_nodes(g)
                p, w = M._tensor([nodes] * self.n, [np.full(g, 1.0 / g)] * self.n)
                u = RadialApproximant(self.phi, self.alpha, s.radii[i]).density(p)
                pts.append(p)
                ws.append(c * u * w)
            self._cache["rule"] = np.concatenate(pts), np.concatenate(ws).astype(complex)
        return self._cache["rule"]

    def to_dict(self):
        return {"type": "radial", "radii": list(self.spec.radii), "order": self.spec.order, "alpha": M._cpair(self.alpha)}

    def has_abscont_part(self):
        return False


def weakstar_integrate(phi: RationalMap, alpha, f, schedule: M.QuadratureSpec | None = None, full_output: bool = False):
    """``lim_{r -> 1} integral f u_r dm`` by polynomial extrapolation in ``1 - r``.

    Each radius is integrated on its own grid of ``ceil(8/(1-r))`` nodes per
    dimension (or ``schedule.radial_nodes``).
    """
    alpha = unimodular(alpha)
    s = schedule or M.DEFAULT_SPEC
    if len(s.radii) < 2:
        raise ValueError("extrapolation needs at least two radii")
    vals = []
    for i, r in enumerate(s.radii):
        g = s.grid_for(i)
        if g < 8.0 / (1.0 - r):
            raise ResolutionError(f"grid {g} too coarse for radius {r}")
        nodes = circle_nodes(g)
        p, w = M._tensor([nodes] * phi.n, [np.full(g, 1.0 / g)] * phi.n)
        u = RadialApproximant(phi, alpha, r).density(p)
        vals.append(np.sum(M._apply(f, p) * u * w))
    steps = 1.0 - np.asarray(s.radii)
    value = complex(richardson(steps, vals, s.order))
    if full_output:
        return value, np.array(vals)
    return value


@dataclass
class ClarkCertificate:
    """Construction record; ``accepted`` iff the panel residual is below 1e-6."""

    representation: str
    poisson_match_residual: float
    mass_residual: float
    exceptional: bool = False
    notes: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return bool(self.poisson_match_residual < ACCEPT_TOL)

    def to_dict(self) -> dict:
        return {
            "representation": self.representation,
            "poisson_match_residual": self.poisson_match_residual,
            "mass_residual": self.mass_residual,
            "exceptional": self.exceptional,
            "accepted": self.accepted,
            "notes": list(self.notes),
        }


def certify(phi: RationalMap, alpha, mu: M.TorusMeasure, q=None, representation: str = "", exceptional: bool = False, notes=()) -> ClarkCertificate:
    alpha = unimodular(alpha)
    zs = z_panel(phi.n)
    got = M.poisson_panel(mu, zs, q)
    want = np.array([clark_symbol(phi, alpha, z) for z in zs])
    mass = M.integrate(mu, 1.0, q).real
    m0 = clark_symbol(phi, alpha, np.zeros(phi.n))
    return ClarkCertificate(
        representation=representation,
        poisson_match_residual=float(np.max(np.abs(got - want))),
        mass_residual=float(abs(mass - m0)),
        exceptional=exceptional,
        notes=list(notes),
    )


def slice_moment_function(phi: RationalMap, alpha: complex) -> Callable:
    """Batched Fourier coefficients of the diagonal slice measures of ``phi``."""

    def moments(directions, K):
        num = diag_slice_coeffs(phi.numerator, directions)
        den = diag_slice_coeffs(phi.denominator, directions)
        return herglotz_moments(num, den, alpha, K)

    return moments


def _nan_guard(v):
    return np.where(np.isfinite(v), v, 0.0)


def construct_clark(phi: RationalMap, alpha, q=None, certify_result: bool = True):
    """Build the Clark measure of ``phi`` at ``alpha`` and certify it.

    Dispatch: a map of one coordinate gives a product measure; a bivariate
    inner map gives a graph measure, completed by line components when
    ``phi`` is identically ``alpha`` on whole circles; a non-inner map gives
    a density integrated slice by slice. If the certificate still fails,
    the radial (weak-*) measure is returned and ``exceptional`` is set.
    Nothing is raised; failures are recorded in the certificate.
    """
    alpha = unimodular(alpha)
    spec = M._spec(q)
    n = phi.n
    deps = phi.depends_on()
    notes = []

    def done(mu, rep, exceptional=False):
        if not certify_result:
            return mu, ClarkCertificate(rep, float("nan"), float("nan"), exceptional, notes)
        cert = certify(phi, alpha, mu, spec, rep, exceptional, notes)
        if cert.accepted:
            return mu, cert
        notes.append(f"{rep} rejected with residual {cert.poisson_match_residual:.3g}; using radial limit")
        radial = RadialMeasure(phi, alpha, spec if len(spec.radii) >= 2 else M.DEFAULT_SPEC)
        cert2 = certify(phi, alpha, radial, spec, "radial", True, notes)
        return radial, cert2

    if len(deps) <= 1:
        j = deps[0] if deps else 0
        B = phi.restrict(j)
        try:
            comp = _univariate_clark(B, alpha, K=max(spec.nodes_per_dim // 2, 64))
        except ClarkError as exc:
            notes.append(str(exc))
            return done(RadialMeasure(phi, alpha, spec), "radial", True)
        comps = [M.Lebesgue()] * n
        comps[j] = comp
        return done(M.Product(tuple(comps)), "product")

    if n == 2 and phi.is_inner:
        graph, table = clark_graph_2d(phi, alpha, N=spec.nodes_per_dim)
        if table.collisions:
            notes.append(f"branch collisions at {len(table.collisions)} samples")
        lines = line_components(phi, alpha)
        if not lines:
            return done(graph, "graph")
        notes.append(f"{len(lines)} line component(s) where phi is identically alpha")
        exceptional = True
        if certify_result:
            alone = certify(phi, alpha, graph, spec, "graph")
            notes.append(f"graph alone: residual {alone.poisson_match_residual:.3g}, mass residual {alone.mass_residual:.3g}")
            exceptional = not alone.accepted
        return done(M.Sum(tuple([(1.0, graph)] + [(1.0, L) for L in lines])), "graph+lines", exceptional)

    if n == 2:
        density = lambda pts: _nan_guard(clark_symbol_boundary(phi, alpha, pts))
        mu = M.AbsCont(density, n=2, label="clark symbol", slice_moments=slice_moment_function(phi, alpha))
        return done(mu, "abscont")

    notes.append("no closed form for this map; using radial limit")
    return done(RadialMeasure(phi, alpha, spec), "radial", True)


def clark_symbol_boundary(phi: RationalMap, alpha, pts) -> np.ndarray:
    """Boundary values of the Clark symbol; NaN at poles and where ``phi = alpha``."""
    v = phi.evaluate(pts, on_pole="nan")
    with np.errstate(divide="ignore", invalid="ignore"):
        return (1.0 - np.abs(v) ** 2) / np.abs(alpha - v) ** 2


def support_residual(phi: RationalMap, alpha, mu: M.TorusMeasure, q=None) -> float:
    """Max of ``|phi - alpha|`` over rule points carrying mass (pole points skipped)."""
    pts, w = M.quadrature_rule(mu, q)
    pts = pts[np.abs(w) > 0]
    v = phi.evaluate(pts, on_pole="nan")
    d = np.abs(v - unimodular(alpha))
    d = d[np.isfinite(d)]
    return float(d.max()) if d.size else 0.0


def slice_measure(phi: RationalMap, alpha, zeta, K: int = 512) -> M.Pushforward:
    """The Clark measure of ``lambda -> phi(lambda zeta)`` carried onto the circle through ``zeta``."""
    alpha = unimodular(alpha)
    zeta = tuple(complex(x) for x in np.asarray(zeta, dtype=complex))
    B = diag_slice(phi, zeta)
    if B.is_constant():
        raise DegenerateSliceError(f"slice of phi through {zeta} is constant")
    if B.is_inner:
        circle = clark_1d(B, alpha)
    else:
        circle = M.Moments(herglotz_moments(B.numerator, B.denominator, alpha, K)[0], "herglotz")
    return M.Pushforward(circle, zeta)


def _slice_rule(phi: RationalMap, alpha: complex, S: int, N: int):
    """Node/weight rule for the average of slice measures over ``zeta = (1, t)``."""
    if not phi.is_inner:
        return M.slice_rule(slice_moment_function(phi, alpha), S, N)
    pts, ws = [], []
    for t in circle_nodes(S):
        p, w = slice_measure(phi, alpha, (1.0, t)).rule(N)
        pts.append(p)
        ws.append(w / S)
    return np.concatenate(pts), np.concatenate(ws)


def verify_slice_decomposition(phi: RationalMap, alpha, f, q=None, slices: int = 256, measure=None) -> float:
    """``|integral f d sigma - average over zeta of integral f d sigma_zeta|``.

    The slice average runs over ``zeta = (1, e^{i psi})`` only: the slice
    integral is unchanged when ``zeta`` is multiplied by a unimodular scalar.
    """
    alpha = unimodular(alpha)
    spec = M._spec(q)
    mu = measure if measure is not None else construct_clark(phi, alpha, spec, certify_result=False)[0]
    lhs = M.integrate(mu, f, spec)
    if phi.n == 1:
        rhs = M.integrate(slice_measure(phi, alpha, (1.0,)), f, spec)
    else:
        pts, w = _slice_rule(phi, alpha, slices, spec.nodes_per_dim)
        rhs = np.sum(M._apply(f, pts) * w)
    return float(abs(lhs - rhs))


def verify_disintegration(phi: RationalMap, f, q=None, M_alpha: int = 128):
    """``|average over alpha of integral f d sigma_alpha - integral f dm|`` on a uniform alpha grid.

    ``f`` may be a list of functions; the residuals are then returned as an array.
    """
    if M_alpha < 64:
        raise ValueError("the alpha grid needs at least 64 points")
    spec = M._spec(q)
    fs = list(f) if isinstance(f, (list, tuple)) else [f]
    lhs = np.zeros(len(fs), dtype=complex)
    for a in circle_nodes(M_alpha):
        mu, _ = construct_clark(phi, a, spec, certify_result=False)
        lhs += M.integrate_many(mu, fs, spec)
    lhs /= M_alpha
    leb = M.Product((M.Lebesgue(),) * phi.n)
    rhs = M.integrate_many(leb, fs, spec)
    res = np.abs(lhs - rhs)
    return res if isinstance(f, (list, tuple)) else float(res[0])


@dataclass
class ContinuityScan:
    alphas: np.ndarray
    values: np.ndarray
    increments: np.ndarray

    @property
    def max_increment(self) -> float:
        return float(self.increments.max()) if self.increments.size else 0.0


def alpha_continuity_scan(phi: RationalMap, f, M_alpha: int = 64, q=None) -> ContinuityScan:
    """Successive differences of ``integral f d sigma_alpha`` over a uniform alpha grid."""
    spec = M._spec(q)
    alphas = circle_nodes(M_alpha)
    vals = np.array([M.integrate(construct_clark(phi, a, spec, certify_result=False)[0], f, spec) for a in alphas])
    return ContinuityScan(alphas, vals, np.abs(np.diff(vals)))
