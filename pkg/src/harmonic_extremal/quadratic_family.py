"""
The quadratic family of convex conformal maps.

A member is fixed by ``(a, lam, c)`` through

    F(0) = 0,    F'(z) = c / q(z),    q(z) = 1 + a z + lam z**2.

When q has no zeros on the closed unit disc the map F is a biholomorphism
onto a bounded strongly convex domain.  This module decides zero-freeness,
evaluates F and F' and certifies convexity of the image.

Complex scalars are plain Python/numpy ``complex`` values throughout.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FamilyParams",
    "SchurCohnVerdict",
    "eval_q",
    "schur_cohn",
    "roots_oracle",
    "eval_F",
    "eval_dF",
    "boundary_curve",
    "convexity_certificate",
    "omega",
    "curvature_profile",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
# shift to [0, 1]
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS
_MAX_PANELS = 4096


@dataclass(frozen=True)
class SchurCohnVerdict:
    zero_free: bool
    margin1: float
    margin2: float


def schur_cohn(a: complex, lam: complex) -> SchurCohnVerdict:
    """Test whether ``1 + a z + lam z**2`` has no zeros on the closed unit disc.

    ``margin1 = 1 - |lam|`` and ``margin2 = (1 - |lam|**2) - |a - conj(a) lam|``;
    the polynomial is zero free exactly when both margins are positive.
    """
    a = complex(a)
    lam = complex(lam)
    m1 = 1.0 - abs(lam)
    m2 = (1.0 - abs(lam) ** 2) - abs(a - a.conjugate() * lam)
    return SchurCohnVerdict(zero_free=bool(m1 > 0 and m2 > 0), margin1=m1, margin2=m2)


@dataclass(frozen=True)
class FamilyParams:
    """Parameters ``(a, lam, c)`` of one strictly zero-free family member."""

    a: complex
    lam: complex
    c: float

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "c", float(self.c))
        for x in (self.a, self.lam, self.c):
            if not cmath.isfinite(x):
                raise ValueError("family parameters must be finite")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        verdict = schur_cohn(self.a, self.lam)
        if not verdict.zero_free:
            raise ValueError(
                "parameters fail the strict Schur-Cohn test "
                f"(margin1={verdict.margin1:.3g}, margin2={verdict.margin2:.3g})"
            )

    @classmethod
    def mobius_disc(cls, p: complex) -> "FamilyParams":
        """Member whose image is the unit disc translated by ``-p``.

        ``F(z) = (1 - |p|**2) z / (1 + conj(p) z)``, i.e. ``a = 2 conj(p)``,
        ``lam = conj(p)**2``.
        """
        p = complex(p)
        pc = p.conjugate()
        return cls(a=2 * pc, lam=pc * pc, c=1.0 - abs(p) ** 2)


def eval_q(params: FamilyParams, z):
    return 1.0 + params.a * z + params.lam * z * z


def roots_oracle(a: complex, lam: complex) -> list[complex]:
    """All zeros of ``1 + a z + lam z**2``, sorted by (modulus, argument).

    Goes through the reciprocal polynomial ``w**2 + a w + lam`` and inverts the
    nonzero roots; a root ``w = 0`` corresponds to a zero at infinity, which
    is exactly the degree drop of q.
    """
    a = complex(a)
    lam = complex(lam)
    if lam == 0:
        roots = [] if a == 0 else [-1.0 / a]
    else:
        # w**2 + a w + lam = 0, stable form of the quadratic formula
        disc = cmath.sqrt(a * a - 4 * lam)
        b = a + disc if abs(a + disc) >= abs(a - disc) else a - disc
        w1 = -b / 2
        w2 = lam / w1
        roots = [1.0 / w1, 1.0 / w2]
    return sorted(roots, key=lambda r: (abs(r), cmath.phase(r)))


def _require_strict(params: FamilyParams):
    v = schur_cohn(params.a, params.lam)
    if not v.zero_free:
        raise ValueError("strict Schur-Cohn condition required")


def _segment_integral(params: FamilyParams, z: np.ndarray, panels: int) -> np.ndarray:
    # int_0^1 c / q(s z) ds by composite 16-point Gauss-Legendre
    edges = np.arange(panels) / panels
    s = (edges[:, None] + _GL_NODES[None, :] / panels).ravel()
    w = np.tile(_GL_WEIGHTS, panels) / panels
    zs = z[..., None] * s
    return (params.c / eval_q(params, zs)) @ w


def eval_F(params: FamilyParams, z, tol: float = DEFAULT_TOL):
    """Evaluate ``F(z) = int_0^z c/q`` along the straight segment from 0.

    Composite 16-point Gauss-Legendre, doubling the panel count until two
    successive estimates differ by at most ``tol``.  Accepts scalars or arrays
    with ``|z| <= 1``.
    """
    _require_strict(params)
    zarr = np.asarray(z, dtype=complex)
    if np.any(np.abs(zarr) > 1 + 1e-12):
        raise ValueError("eval_F requires |z| <= 1")
    flat = zarr.ravel()
    panels = 1
    prev = flat * _segment_integral(params, flat, panels)
    while True:
        panels *= 2
        cur = flat * _segment_integral(params, flat, panels)
        if np.max(np.abs(cur - prev), initial=0.0) <= tol:
            break
        if panels >= _MAX_PANELS:
            raise RuntimeError("eval_F quadrature failed to converge")
        prev = cur
    out = cur.reshape(zarr.shape)
    return complex(out) if out.ndim == 0 else out


def eval_dF(params: FamilyParams, z):
    return params.c / eval_q(params, z)


def boundary_curve(params: FamilyParams, n: int, tol: float = DEFAULT_TOL):
    """Samples ``F(exp(2 pi i j / n))``, j = 0..n-1, as a BoundaryFunction."""
    from .disc_harmonics import BoundaryFunction

    if n < 8:
        raise ValueError("boundary_curve needs n >= 8")
    t = 2 * np.pi * np.arange(n) / n
    return BoundaryFunction(eval_F(params, np.exp(1j * t), tol=tol))


def convexity_certificate(a: complex, lam: complex) -> tuple[bool, bool, float]:
    """Return ``(convex, strong, margin)`` for the image of F.

    ``margin = (1 - |lam|**2) - |a - conj(a) lam|`` is a quarter of the minimum
    over the unit circle of ``|2 + conj(a) z|**2 - |a + 2 lam z|**2``.
    """
    a = complex(a)
    lam = complex(lam)
    if abs(lam) >= 1:
        raise ValueError("convexity certificate requires |lam| < 1")
    margin = (1.0 - abs(lam) ** 2) - abs(a - a.conjugate() * lam)
    return bool(margin >= 0), bool(margin > 0), margin


def omega(a: complex, lam: complex, z):
    """``(p - 1)/(p + 1) = -z (a + 2 lam z) / (2 + a z)`` for ``p = 1 + z F''/F'``."""
    z = np.asarray(z, dtype=complex)
    den = 2.0 + a * z
    if np.any(np.abs(den) < 1e-14):
        raise ZeroDivisionError("2 + a z vanishes")
    out = -z * (a + 2 * lam * z) / den
    return complex(out) if out.ndim == 0 else out


def curvature_profile(params: FamilyParams, n: int) -> np.ndarray:
    """Signed curvature of ``t -> F(e^{it})`` at n uniform angles.

    Equals ``Re(1 + z F''/F') / |F'|`` on ``|z| = 1``.
    """
    _require_strict(params)
    z = np.exp(2j * np.pi * np.arange(n) / n)
    q = eval_q(params, z)
    p = (1.0 - params.lam * z * z) / q
    return p.real / np.abs(params.c / q)
