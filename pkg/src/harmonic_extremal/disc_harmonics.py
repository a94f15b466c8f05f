"""
Poisson extension of sampled circle data and the three Fourier moments that
encode ``f(0)``, ``f_zbar(0)`` and ``Re f_z(0)`` of the extension.

All circle integrals are uniform trapezoid sums on ``t_j = 2 pi j / n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BoundaryFunction",
    "MomentVector",
    "moments",
    "weighted_moment",
    "poisson_eval",
    "polar_grid",
    "containment_excess",
    "containment_check",
    "DEFAULT_N",
]

DEFAULT_N = 2048


class BoundaryFunction:
    """Uniform samples ``psi(e^{i t_j})`` of a map from the circle to the plane."""

    def __init__(self, values):
        values = np.array(values, dtype=complex).ravel()
        if values.size < 8:
            raise ValueError("a boundary function needs at least 8 samples")
        if not np.all(np.isfinite(values)):
            raise ValueError("boundary values must be finite")
        values.setflags(write=False)
        self.values = values

    @classmethod
    def from_function(cls, func, n: int) -> "BoundaryFunction":
        t = 2 * np.pi * np.arange(n) / n
        return cls(func(t))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n) / self.n

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"BoundaryFunction(n={self.n})"


@dataclass(frozen=True)
class MomentVector:
    A0: complex
    A1: complex
    J: float


def moments(psi: BoundaryFunction) -> MomentVector:
    e = np.exp(1j * psi.t)
    v = psi.values
    A0 = v.mean()
    A1 = (e * v).mean()
    J = (np.conj(e) * v).mean().real
    return MomentVector(complex(A0), complex(A1), float(J))


def weighted_moment(psi: BoundaryFunction, a: complex, lam: complex, check: bool = True) -> float:
    """``Re mean(V(t) psi)`` with ``V(t) = e^{-it} + a + lam e^{it}``.

    Computed directly from V; with ``check`` it is compared against
    ``J + Re(a A0) + Re(lam A1)``.
    """
    e = np.exp(1j * psi.t)
    V = np.conj(e) + a + lam * e
    direct = float((V * psi.values).mean().real)
    if check:
        m = moments(psi)
        via = m.J + (a * m.A0).real + (lam * m.A1).real
        scale = np.abs(V).max() * np.abs(psi.values).max()
        if abs(direct - via) > 1e-11 * max(scale, 1.0):
            raise ArithmeticError(f"weighted moment mismatch: {direct!r} vs {via!r}")
    return direct


def _poisson_weights(n: int, z: np.ndarray) -> np.ndarray:
    e = np.exp(2j * np.pi * np.arange(n) / n)
    r2 = np.abs(z) ** 2
    P = (1.0 - r2)[..., None] / np.abs(e - z[..., None]) ** 2
    # renormalise so each row is an exact convex combination
    return P / P.sum(axis=-1, keepdims=True)


def poisson_eval(psi: BoundaryFunction, z, chunk: int = 512):
    """Discrete Poisson integral of ``psi`` at points ``|z| < 1``."""
    zarr = np.asarray(z, dtype=complex)
    if np.any(np.abs(zarr) >= 1):
        raise ValueError("poisson_eval requires |z| < 1")
    flat = zarr.ravel()
    out = np.empty_like(flat)
    for s in range(0, flat.size, chunk):
        out[s:s + chunk] = _poisson_weights(psi.n, flat[s:s + chunk]) @ psi.values
    out = out.reshape(zarr.shape)
    return complex(out) if out.ndim == 0 else out


def polar_grid(grid: int, rmax: float = 0.99) -> np.ndarray:
    radii = rmax * np.arange(1, grid + 1) / grid
    ang = 2 * np.pi * np.arange(grid) / grid
    pts = (radii[:, None] * np.exp(1j * ang)[None, :]).ravel()
    return np.concatenate([[0j], pts])


def containment_excess(psi: BoundaryFunction, D, grid: int = 64):
    """Largest outward excess of ``P[psi]`` over ``D`` on the polar grid.

    Returns ``(excess, worst_z, worst_w)``; a non-positive excess means every
    grid value lies in the closed domain.
    """
    z = polar_grid(grid)
    w = poisson_eval(psi, z)
    ex = D.excess(w)
    k = int(np.argmax(ex))
    return float(ex[k]), complex(z[k]), complex(w[k])


def containment_check(psi: BoundaryFunction, D, grid: int = 64, slack: float = 1e-9) -> bool:
    """Maximum-principle check that the Poisson extension stays inside ``D``."""
    bex = D.excess(psi.values)
    if np.max(bex) > slack:
        j = int(np.argmax(bex))
        raise ValueError(
            f"boundary value {psi.values[j]:.6g} at index {j} lies outside the domain by {bex[j]:.3g}"
        )
    return containment_excess(psi, D, grid)[0] <= slack
