"""Cauchy, Poisson and model-space reproducing kernels of the polydisc.

All kernels broadcast over leading axes; the last axis holds the ``n``
coordinates of a point. Products over coordinates are taken in coordinate
order.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

RENORMALIZE_TOL = 1e-8


class DiscPoint:
    """A point of the open polydisc ``D^n``."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.atleast_1d(np.asarray(coords, dtype=complex)).copy()
        if c.ndim != 1 or c.size == 0:
            raise DomainError(f"expected a non-empty 1-D coordinate list, got shape {c.shape}")
        if np.any(~np.isfinite(c)) or np.any(np.abs(c) >= 1.0):
            raise DomainError(f"point {c} is not inside the open polydisc")
        c.setflags(write=False)
        self.coords = c

    @property
    def n(self) -> int:
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return self.coords.size

    def __repr__(self):
        return f"DiscPoint({list(self.coords)})"


class TorusPoint:
    """A point of the torus ``T^n``.

    Coordinates within ``1e-8`` of the unit circle are silently projected
    onto it; anything further off is rejected.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.atleast_1d(np.asarray(coords, dtype=complex)).copy()
        if c.ndim != 1 or c.size == 0:
            raise DomainError(f"expected a non-empty 1-D coordinate list, got shape {c.shape}")
        mod = np.abs(c)
        if np.any(~np.isfinite(c)) or np.any(np.abs(mod - 1.0) > RENORMALIZE_TOL):
            raise DomainError(f"point {c} is not on the torus")
        c = c / mod
        c.setflags(write=False)
        self.coords = c

    @classmethod
    def from_turns(cls, turns) -> "TorusPoint":
        return cls(np.exp(2j * np.pi * np.asarray(turns, dtype=float)))

    @property
    def n(self) -> int:
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return self.coords.size

    def __repr__(self):
        return f"TorusPoint({list(self.coords)})"


def as_disc(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) >= 1.0):
        raise DomainError("point outside the open polydisc")
    return z


def cauchy_product(z, w) -> np.ndarray:
    """``prod_j 1 / (1 - z_j conj(w_j))`` without any domain check."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.prod(1.0 / (1.0 - z * np.conj(w)), axis=-1)


def cauchy_kernel(z, zeta) -> np.ndarray:
    """Cauchy kernel ``C(z, zeta) = prod_j 1/(1 - z_j conj(zeta_j))``.

    ``z`` must lie in the open polydisc. The conjugate-argument form
    ``C(zeta, z)`` equals ``conj(cauchy_kernel(z, zeta))`` for ``zeta`` on
    the torus.
    """
    return cauchy_product(as_disc(z), zeta)


def poisson_kernel(z, zeta) -> np.ndarray:
    """Poisson kernel ``prod_j (1 - |z_j|^2) / |1 - z_j conj(zeta_j)|^2``.

    This is the product form of ``C(z,zeta) C(zeta,z) / C(z,z)``.
    """
    z = as_disc(z)
    zeta = np.asarray(zeta, dtype=complex)
    return np.prod((1.0 - np.abs(z) ** 2) / np.abs(1.0 - z * np.conj(zeta)) ** 2, axis=-1)


def reproducing_kernel(I, z, w) -> np.ndarray:
    """Model-space kernel ``K(z, w) = (1 - I(z) conj(I(w))) C(z, w)``."""
    z = as_disc(z)
    w = as_disc(w)
    return (1.0 - I(z) * np.conj(I(w))) * cauchy_product(z, w)
