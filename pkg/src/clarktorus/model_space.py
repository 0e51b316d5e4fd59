"""Model-space kernels, the isometry ``T_alpha`` and density scans.

``T_alpha`` sends the model-space kernel ``K_w`` to the boundary function
``(1 - alpha conj(I(w))) C(., w)`` in ``L^2(sigma_alpha)``. The checks here
compare quadrature over constructed Clark measures with closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import measures as M
from .clark import construct_clark, unimodular
from .errors import ResolutionError
from .inner_functions import RationalMap, diag_slice_coeffs
from .kernels import as_disc, cauchy_product, reproducing_kernel
from .numerics import circle_nodes, series_div, series_mul


@dataclass(frozen=True)
class KernelVector:
    """The model-space kernel ``K_w = K(., w)`` of an inner function."""

    I: RationalMap
    w: tuple

    def __post_init__(self):
        as_disc(self.w)

    def __call__(self, z):
        return reproducing_kernel(self.I, z, np.asarray(self.w, dtype=complex))


def t_alpha_apply(I: RationalMap, alpha, w) -> Callable:
    """The boundary function ``xi -> (1 - alpha conj(I(w))) C(xi, w)``."""
    alpha = unimodular(alpha)
    w = as_disc(w)
    c = 1.0 - alpha * np.conj(I(w))
    return lambda xi: c * cauchy_product(xi, w)


def _measure(phi, alpha, q, measure):
    if measure is not None:
        return measure
    return construct_clark(phi, alpha, q, certify_result=False)[0]


def verify_cauchy_double(phi: RationalMap, alpha, z, w, q=None, measure=None) -> float:
    """Residual of ``integral C(z, zeta) C(zeta, w) d sigma_alpha`` against its closed form."""
    alpha = unimodular(alpha)
    z, w = as_disc(z), as_disc(w)
    mu = _measure(phi, alpha, q, measure)
    lhs = M.integrate(mu, lambda p: cauchy_product(z, p) * cauchy_product(p, w), q)
    fz, fw = phi(z), phi(w)
    rhs = (1 - fz * np.conj(fw)) / ((1 - np.conj(alpha) * fz) * (1 - alpha * np.conj(fw))) * cauchy_product(z, w)
    return float(abs(lhs - rhs))


def cauchy_transform_closed_form(phi: RationalMap, alpha, z) -> complex:
    alpha = unimodular(alpha)
    f0 = complex(phi(np.zeros(phi.n)))
    return complex(1 / (1 - np.conj(alpha) * phi(as_disc(z))) + alpha * np.conj(f0) / (1 - alpha * np.conj(f0)))


def verify_cauchy_transform(phi: RationalMap, alpha, z, q=None, measure=None) -> float:
    """Residual of the Cauchy transform of ``sigma_alpha`` against its closed form."""
    alpha = unimodular(alpha)
    mu = _measure(phi, alpha, q, measure)
    return float(abs(M.cauchy_transform(mu, z, q) - cauchy_transform_closed_form(phi, alpha, z)))


def kernel_gram(I: RationalMap, alpha, points, q=None, measure=None) -> np.ndarray:
    """``G[i, j] = (T K_{w_j}, T K_{w_i})`` in ``L^2(sigma_alpha)``."""
    alpha = unimodular(alpha)
    mu = _measure(I, alpha, q, measure)
    pts, wt = M.quadrature_rule(mu, q)
    F = np.stack([t_alpha_apply(I, alpha, w)(pts) for w in points], axis=1)
    return F.conj().T @ (wt[:, None] * F)


def isometry_gram_residual(I: RationalMap, alpha, points, q=None, measure=None) -> float:
    """Max over pairs of ``|(T K_w, T K_z) - K(z, w)|``."""
    G = kernel_gram(I, alpha, points, q, measure)
    P = [as_disc(p) for p in points]
    K = np.array([[reproducing_kernel(I, z, w) for w in P] for z in P])
    return float(np.max(np.abs(G - K)))


def annihilation_check(I: RationalMap, k: int, w, w2, q=None, slices: int = 64) -> float:
    """``|integral K_w conj(K_w2) conj(I)^k dm|`` on ``T^2`` for ``k != 0``.

    On the torus ``conj(I) = 1/I``, so the integrand is ``h`` times a
    combination of powers ``I^j`` with ``h = C(., w) conj(C(., w2))``. Each
    diagonal slice ``lambda -> (lambda, lambda t)`` is integrated by pairing
    the Fourier coefficients of ``h`` with the Taylor coefficients of the
    slice of ``I^|j|``; the slices are then averaged over ``t``.
    """
    k = int(k)
    if k == 0:
        raise ValueError("k must be nonzero")
    if I.n != 2:
        raise ValueError("annihilation_check is bivariate")
    if not I.is_inner:
        raise ValueError("annihilation needs an inner function")
    N = M._spec(q).nodes_per_dim
    if N < 16 * (abs(k) + 2):
        raise ResolutionError(f"{N} nodes are too few for k = {k}")
    w, w2 = as_disc(w), as_disc(w2)
    a, a2 = complex(I(w)), complex(I(w2))
    terms = {-k: 1 + np.conj(a) * a2, 1 - k: -np.conj(a), -1 - k: -a2}

    S, K = slices, N // 2
    t = circle_nodes(S)
    dirs = np.stack([np.ones(S, dtype=complex), t], axis=1)
    num = diag_slice_coeffs(I.numerator, dirs)
    den = diag_slice_coeffs(I.denominator, dirs)
    b = series_div(num, den, K)
    top = max(abs(j) for j in terms)
    pw = [np.zeros((S, K), dtype=complex)]
    pw[0][:, 0] = 1.0
    for _ in range(top):
        pw.append(series_mul(pw[-1], b))

    lam = circle_nodes(N)
    pts = np.stack([np.broadcast_to(lam, (S, N)), t[:, None] * lam[None, :]], axis=-1)
    h = cauchy_product(pts, w) * np.conj(cauchy_product(pts, w2))
    hh = np.fft.fft(h, axis=1) / N  # hh[:, m] multiplies lambda**(-m)... see below
    # np.fft.fft gives sum_n h_n lam_n**(-m), i.e. the coefficient of lambda**m
    idx = np.arange(K)
    total = np.zeros(S, dtype=complex)
    for j, c in terms.items():
        if j >= 0:
            total += c * np.sum(hh[:, (-idx) % N] * pw[j], axis=1)
        else:
            total += c * np.sum(hh[:, idx] * np.conj(pw[-j]), axis=1)
    return float(abs(total.mean()))


def default_targets() -> dict:
    return {
        "conj(z1)": lambda p: np.conj(p[:, 0]),
        "conj(z2)": lambda p: np.conj(p[:, 1]),
        "conj(z1 z2)": lambda p: np.conj(p[:, 0] * p[:, 1]),
    }


@dataclass
class GramReport:
    """Least-squares distance from a target to analytic polynomials of degree ``D``."""

    alpha: complex
    target: str
    degrees: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    conditions: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        r = self.residuals
        if r and r[-1] < 1e-4:
            return "density-consistent"
        if len(r) >= 4 and min(r[-4:]) >= 1e-2:
            return "obstruction found"
        return "inconclusive"

    @property
    def decay_ratio(self) -> float:
        """Geometric mean of ``rho_{D+1} / rho_D`` over the last four steps.

        Advisory only: a ratio well below 1 with a large ``rho`` means slow
        but geometric convergence (a pole of the graph near the circle), not
        an obstruction.
        """
        r = np.asarray(self.residuals[-5:], dtype=float)
        if r.size < 2 or np.any(r <= 1e-14):
            return 0.0
        return float(np.exp(np.mean(np.diff(np.log(r)))))

    def is_monotone(self, slack: float = 1e-10) -> bool:
        return all(b <= a + slack for a, b in zip(self.residuals, self.residuals[1:]))

    def to_dict(self) -> dict:
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "target": self.target,
            "verdict": self.verdict,
            "decay_ratio": self.decay_ratio,
            "rows": [{"degree": d, "residual": r, "condition": c} for d, r, c in zip(self.degrees, self.residuals, self.conditions)],
        }


def unitarity_residual_scan(
    I: RationalMap,
    alpha,
    target: Callable | str = "conj(z2)",
    maxdeg: int = 8,
    q=None,
    measure=None,
    ridge: float = 1e-12,
    rule_nodes: int = 128,
) -> GramReport:
    """Residuals ``rho_D``, ``D = 0..maxdeg``, of ``target`` against ``span{z1^a z2^b : a, b <= D}``.

    Least squares in ``L^2(sigma_alpha)`` via ridge-regularized normal
    equations; the residual is evaluated directly on the quadrature rule.
    """
    if maxdeg > 16:
        raise ValueError("maxdeg is limited to 16")
    if I.n != 2:
        raise ValueError("the scan is bivariate")
    alpha = unimodular(alpha)
    label = target if isinstance(target, str) else getattr(target, "__name__", "target")
    f = default_targets()[target] if isinstance(target, str) else target
    spec = M._spec(q)
    mu = _measure(I, alpha, spec, measure)
    pts, wt = mu.rule(min(rule_nodes, spec.nodes_per_dim))
    wt = wt.real
    keep = wt != 0
    pts, wt = pts[keep], wt[keep]
    tv = np.asarray(f(pts), dtype=complex)
    report = GramReport(alpha=alpha, target=label)
    for D in range(maxdeg + 1):
        e = np.arange(D + 1)
        A = (pts[:, 0:1] ** e)[:, :, None] * (pts[:, 1:2] ** e)[:, None, :]
        A = A.reshape(len(pts), -1)
        WA = wt[:, None] * A
        G = A.conj().T @ WA + ridge * np.eye(A.shape[1])
        rhs = WA.conj().T @ tv
        c = np.linalg.solve(G, rhs)
        r = tv - A @ c
        rho = float(np.sqrt(max(np.sum(wt * np.abs(r) ** 2), 0.0)))
        report.degrees.append(D)
        report.residuals.append(rho)
        report.conditions.append(float(np.linalg.cond(G)))
    return report


def unitarity_scan_all(I: RationalMap, alpha, maxdeg: int = 8, q=None, measure=None) -> dict:
    """Scans for every default target, sharing one measure."""
    alpha = unimodular(alpha)
    mu = _measure(I, alpha, q, measure)
    return {name: unitarity_residual_scan(I, alpha, name, maxdeg, q, mu) for name in default_targets()}
