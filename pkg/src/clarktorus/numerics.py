"""Small numerical helpers shared across modules.

Polynomial coefficient arrays are stored lowest degree first throughout:
``c[k]`` multiplies ``x**k``.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def circle_nodes(n: int, offset: float = 0.0) -> np.ndarray:
    """Uniform nodes ``exp(2 pi i (k + offset) / n)`` on the unit circle."""
    return np.exp(1j * TWO_PI * (np.arange(n) + offset) / n)


def trim(coeffs: np.ndarray, rtol: float = 1e-14) -> np.ndarray:
    """Drop negligible leading (highest-degree) coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return c[:1] * 0
    last = len(c) - 1
    while last > 0 and abs(c[last]) <= rtol * scale:
        last -= 1
    return c[: last + 1]


def companion_roots(coeffs) -> np.ndarray:
    """Roots of a univariate polynomial via companion-matrix eigenvalues.

    The polynomial is normalized to be monic first. Leading coefficients
    below ``1e-14`` of the largest one are treated as zero.
    """
    c = trim(np.asarray(coeffs, dtype=complex))
    deg = len(c) - 1
    if deg < 1:
        return np.empty(0, dtype=complex)
    monic = c[:-1] / c[-1]
    comp = np.zeros((deg, deg), dtype=complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic
    return np.linalg.eigvals(comp)


def batched_roots(rows: np.ndarray, rtol: float = 1e-12) -> list[np.ndarray]:
    """Companion roots for every row of a ``(S, d + 1)`` coefficient array.

    Rows sharing an effective degree are solved together with one batched
    eigenvalue call. Rows that vanish identically get an empty root list.
    """
    rows = np.asarray(rows, dtype=complex)
    S, width = rows.shape
    mags = np.abs(rows)
    scale = mags.max(axis=1)
    out: list[np.ndarray] = [np.empty(0, dtype=complex)] * S
    deg = np.full(S, -1)
    for k in range(width - 1, -1, -1):
        hit = (deg < 0) & (mags[:, k] > rtol * scale) & (scale > 0)
        deg[hit] = k
    for d in np.unique(deg):
        if d < 1:
            continue
        idx = np.nonzero(deg == d)[0]
        monic = rows[idx, :d] / rows[idx, d : d + 1]
        comp = np.zeros((len(idx), d, d), dtype=complex)
        if d > 1:
            comp[:, 1:, :-1] = np.eye(d - 1)
        comp[:, :, -1] = -monic
        eig = np.linalg.eigvals(comp)
        for i, s in enumerate(idx):
            out[s] = eig[i]
    return out


def polyval(coeffs, x):
    """Evaluate a univariate polynomial (lowest degree first) by Horner."""
    c = np.asarray(coeffs, dtype=complex)
    x = np.asarray(x, dtype=complex)
    acc = np.zeros(np.broadcast(x, c[..., 0]).shape, dtype=complex)
    for k in range(c.shape[-1] - 1, -1, -1):
        acc = acc * x + c[..., k]
    return acc


def polymul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two dense n-variate coefficient grids of equal ndim."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    shape = tuple(sa + sb - 1 for sa, sb in zip(a.shape, b.shape))
    out = np.zeros(shape, dtype=complex)
    for idx in zip(*np.nonzero(a)):
        sl = tuple(slice(i, i + s) for i, s in zip(idx, b.shape))
        out[sl] += a[idx] * b
    return out


def polyder(c: np.ndarray, axis: int) -> np.ndarray:
    """Partial derivative of a dense coefficient grid along ``axis``."""
    c = np.asarray(c, dtype=complex)
    if c.shape[axis] == 1:
        return np.zeros_like(c)
    k = np.arange(1, c.shape[axis])
    shape = [1] * c.ndim
    shape[axis] = -1
    return np.take(c, np.arange(1, c.shape[axis]), axis=axis) * k.reshape(shape)


def series_div(num: np.ndarray, den: np.ndarray, K: int) -> np.ndarray:
    """First ``K`` Taylor coefficients of ``num / den``, batched on axis 0.

    ``num`` and ``den`` are ``(S, d)`` arrays of polynomial coefficients;
    ``den[:, 0]`` must be nonzero.
    """
    num = np.atleast_2d(np.asarray(num, dtype=complex))
    den = np.atleast_2d(np.asarray(den, dtype=complex))
    S = max(num.shape[0], den.shape[0])
    n = np.zeros((S, K), dtype=complex)
    m = min(K, num.shape[1])
    n[:, :m] = num[:, :m]
    d = np.broadcast_to(den, (S, den.shape[1]))
    out = np.zeros((S, K), dtype=complex)
    dl = d.shape[1] - 1
    inv0 = 1.0 / d[:, 0]
    for k in range(K):
        acc = n[:, k].copy()
        top = min(k, dl)
        if top:
            # out[k-1], ..., out[k-top] against d[1], ..., d[top]
            acc -= np.einsum("sj,sj->s", d[:, 1 : top + 1], out[:, k - top : k][:, ::-1])
        out[:, k] = acc * inv0
    return out


def series_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated product of two batched power series of equal length."""
    K = a.shape[-1]
    L = 1 << int(np.ceil(np.log2(2 * K)))
    return np.fft.ifft(np.fft.fft(a, L) * np.fft.fft(b, L))[..., :K]


def gauss_legendre(a: np.ndarray, b: np.ndarray, order: int):
    """Gauss-Legendre nodes and weights on each panel ``[a_i, b_i]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    a = np.asarray(a, dtype=float)[:, None]
    b = np.asarray(b, dtype=float)[:, None]
    half = (b - a) / 2
    return (a + b) / 2 + half * x, half * w


def richardson(steps, values, order: int):
    """Extrapolate ``values(step)`` to ``step = 0``.

    A polynomial of degree ``order`` in the step is fitted through the
    ``order + 1`` smallest steps (Neville's scheme); ``order = 0`` returns
    the value at the smallest step.
    """
    steps = np.asarray(steps, dtype=float)
    values = np.asarray(values, dtype=complex)
    idx = np.argsort(steps)[: order + 1]
    h = steps[idx]
    p = values[idx].copy()
    m = len(h)
    for k in range(1, m):
        for i in range(m - k):
            p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i])
    return p[0]
