"""
Bounded convex planar bodies accessed through their support functional

    H_D(v) = sup_{w in closure(D)} Re(v w),

which is positively homogeneous in the complex direction ``v``.  With
``v = exp(-it)`` it is the usual support function ``h_D(t)``.

Four variants share one interface: :class:`Polygon`, :class:`Disc`,
:class:`Ellipse` and :class:`SampledSmooth`.  Every query accepts a scalar or
an array of directions/points and is vectorised over it.
"""

from __future__ import annotations

import numpy as np

from .quadratic_family import FamilyParams, boundary_curve

__all__ = [
    "ConvexDomain",
    "Polygon",
    "Disc",
    "Ellipse",
    "SampledSmooth",
    "from_family",
]

_TIE_RTOL = 1e-12
_CONVEXITY_TOL = 1e-10
_PROBES = 4096


def _as_scalar(x):
    return x.item() if np.ndim(x) == 0 else x


def _directions(v):
    v = np.asarray(v, dtype=complex)
    if np.any(v == 0):
        raise ValueError("support queries need a nonzero direction")
    return v


class ConvexDomain:
    """Common interface; subclasses implement ``_support_point``."""

    kind = "abstract"

    def support_point(self, v):
        """A maximiser of ``Re(v w)`` over the closed domain."""
        v = _directions(v)
        return _as_scalar(self._support_point(v.ravel()).reshape(v.shape))

    def support_value(self, v):
        v = _directions(v)
        w = self._support_point(v.ravel()).reshape(v.shape)
        return _as_scalar((v * w).real)

    def support(self, v):
        """``(H_D(v), support_point(v))`` from a single evaluation."""
        v = _directions(v)
        w = self._support_point(v.ravel()).reshape(v.shape)
        return (v * w).real, w

    def excess(self, w) -> np.ndarray:
        """``max_{|v|=1} Re(v w) - H_D(v)`` over the probe directions.

        Positive values are (approximately) the distance of ``w`` outside
        the closed domain.
        """
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        return self._directional_excess(w)

    def contains(self, w, slack: float = 0.0):
        ex = self.excess(w)
        res = ex <= slack
        return bool(res[0]) if np.ndim(w) == 0 else res.reshape(np.shape(w))

    def perimeter(self) -> float:
        t = 2 * np.pi * np.arange(8192) / 8192
        return float(self.support_value(np.exp(-1j * t)).sum() * (2 * np.pi / 8192))

    def inradius(self, p: complex = 0j) -> float:
        """Distance from an interior point ``p`` to the boundary (negative outside)."""
        return -float(self._directional_excess(np.array([complex(p)]), refine=True)[0])

    def width(self, v) -> float:
        v = complex(v) / abs(v)
        return float(self.support_value(v) + self.support_value(-v))

    def diameter(self) -> float:
        phi = np.pi * np.arange(_PROBES // 2) / (_PROBES // 2)
        v = np.exp(1j * phi)
        return float(np.max(self.support_value(v) + self.support_value(-v)))

    def translate(self, p: complex) -> "ConvexDomain":
        """The translated body ``D - p``."""
        raise NotImplementedError

    def scaled(self, s: float) -> "ConvexDomain":
        raise NotImplementedError

    def rotated(self, theta: float) -> "ConvexDomain":
        raise NotImplementedError

    def boundary_samples(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def _directional_excess(self, w, refine: bool = True, chunk: int = 256):
        # max over unit directions u = e^{-i phi} of Re(u w) - H(u): coarse probes,
        # then bisection on the envelope derivative Re(-i u (w - w*(u)))
        phi = 2 * np.pi * np.arange(_PROBES) / _PROBES
        u = np.exp(-1j * phi)
        H = self.support_value(u)
        out = np.empty(w.size)
        for s in range(0, w.size, chunk):
            ws = w[s:s + chunk]
            f = (u[None, :] * ws[:, None]).real - H[None, :]
            k = np.argmax(f, axis=1)
            out[s:s + chunk] = f[np.arange(ws.size), k]
            if refine:
                out[s:s + chunk] = np.maximum(out[s:s + chunk], self._bisect_excess(ws, phi[k]))
        return out

    def _bisect_excess(self, w, phi0, iters=48):
        def slope(ph):
            uu = np.exp(-1j * ph)
            return (-1j * uu * (w - self.support_point(uu))).real

        dphi = 2 * np.pi / _PROBES
        lo, hi = phi0 - dphi, phi0 + dphi
        ok = (slope(lo) >= 0) & (slope(hi) <= 0)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            up = slope(mid) > 0
            lo = np.where(up, mid, lo)
            hi = np.where(up, hi, mid)
        uu = np.exp(-1j * 0.5 * (lo + hi))
        val = (uu * w).real - self.support_value(uu)
        return np.where(ok, val, -np.inf)


class Polygon(ConvexDomain):
    """Strictly convex polygon with counterclockwise vertices."""

    kind = "polygon"

    def __init__(self, vertices):
        V = np.array(vertices, dtype=complex).ravel()
        if V.size < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        if not np.all(np.isfinite(V)):
            raise ValueError("vertices must be finite")
        E = np.roll(V, -1) - V
        if np.any(np.abs(E) == 0):
            raise ValueError("repeated vertices")
        cross = (np.conj(E) * np.roll(E, -1)).imag
        if np.any(cross <= 0):
            raise ValueError("vertices must be in strictly convex counterclockwise order")
        turn = np.angle(np.roll(E, -1) / E)
        if abs(turn.sum() - 2 * np.pi) > 1e-8:
            raise ValueError("vertex sequence winds more than once")
        V.setflags(write=False)
        self.vertices = V
        self._normals = -1j * E / np.abs(E)
        self._scale = float(np.abs(V).max())

    def _support_point(self, v):
        vals = (v[:, None] * self.vertices[None, :]).real
        top = vals.max(axis=1, keepdims=True)
        tol = _TIE_RTOL * np.abs(v)[:, None] * max(self._scale, 1e-300)
        idx = np.argmax(vals >= top - tol, axis=1)
        return self.vertices[idx]

    def excess(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        d = (np.conj(self._normals)[None, :] * (w[:, None] - self.vertices[None, :])).real
        return d.max(axis=1)

    def inradius(self, p=0j):
        return -float(self.excess(complex(p))[0])

    def perimeter(self):
        # vertex k supports directions between the normals of edges k-1 and k;
        # integrate Re(e^{-it} V_k) exactly over each such arc
        th = np.angle(self._normals)
        th_prev = np.roll(th, 1)
        arcs = 1j * (np.exp(-1j * th) - np.exp(-1j * th_prev))
        return float((self.vertices * arcs).real.sum())

    def edge_length_sum(self) -> float:
        return float(np.abs(np.roll(self.vertices, -1) - self.vertices).sum())

    def diameter(self):
        V = self.vertices
        return float(np.abs(V[:, None] - V[None, :]).max())

    def translate(self, p):
        return Polygon(self.vertices - complex(p))

    def scaled(self, s):
        return Polygon(self.vertices * float(s))

    def rotated(self, theta):
        return Polygon(self.vertices * np.exp(1j * theta))

    def boundary_samples(self, n):
        V = self.vertices
        E = np.roll(V, -1) - V
        L = np.abs(E)
        cum = np.concatenate([[0.0], np.cumsum(L)])
        s = cum[-1] * np.arange(n) / n
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, V.size - 1)
        return V[k] + E[k] * ((s - cum[k]) / L[k])

    def __repr__(self):
        return f"Polygon({self.vertices.size} vertices)"


class Disc(ConvexDomain):
    kind = "disc"

    def __init__(self, center=0j, radius=1.0):
        self.center = complex(center)
        self.radius = float(radius)
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def _support_point(self, v):
        return self.center + self.radius * np.conj(v) / np.abs(v)

    def excess(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        return np.abs(w - self.center) - self.radius

    def inradius(self, p=0j):
        return self.radius - abs(complex(p) - self.center)

    def perimeter(self):
        return 2 * np.pi * self.radius

    def diameter(self):
        return 2 * self.radius

    def translate(self, p):
        return Disc(self.center - complex(p), self.radius)

    def scaled(self, s):
        return Disc(self.center * s, self.radius * s)

    def rotated(self, theta):
        return Disc(self.center * np.exp(1j * theta), self.radius)

    def boundary_samples(self, n):
        return self.center + self.radius * np.exp(2j * np.pi * np.arange(n) / n)

    def __repr__(self):
        return f"Disc(center={self.center}, radius={self.radius})"


class Ellipse(ConvexDomain):
    """Ellipse with semi-axes along the directions ``rotation`` and ``rotation + pi/2``."""

    kind = "ellipse"

    def __init__(self, center=0j, semi_axis_x=1.0, semi_axis_y=1.0, rotation=0.0):
        self.center = complex(center)
        self.semi_axis_x = float(semi_axis_x)
        self.semi_axis_y = float(semi_axis_y)
        self.rotation = float(rotation)
        if not (self.semi_axis_x > 0 and self.semi_axis_y > 0):
            raise ValueError("semi-axes must be positive")

    def _support_point(self, v):
        u = v * np.exp(1j * self.rotation)
        ax, ay = self.semi_axis_x, self.semi_axis_y
        R = np.hypot(u.real * ax, u.imag * ay)
        local = (ax * ax * u.real - 1j * ay * ay * u.imag) / R
        return self.center + np.exp(1j * self.rotation) * local

    def excess(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        out = self._directional_excess(w)
        loc = (w - self.center) * np.exp(-1j * self.rotation)
        inside = (loc.real / self.semi_axis_x) ** 2 + (loc.imag / self.semi_axis_y) ** 2 <= 1.0
        # the quadratic form is exact; keep the probe margin only as a magnitude
        out[inside] = np.minimum(out[inside], 0.0)
        out[~inside] = np.maximum(out[~inside], np.finfo(float).tiny)
        return out

    def diameter(self):
        return 2 * max(self.semi_axis_x, self.semi_axis_y)

    def translate(self, p):
        return Ellipse(self.center - complex(p), self.semi_axis_x, self.semi_axis_y, self.rotation)

    def scaled(self, s):
        return Ellipse(self.center * s, self.semi_axis_x * s, self.semi_axis_y * s, self.rotation)

    def rotated(self, theta):
        return Ellipse(self.center * np.exp(1j * theta), self.semi_axis_x, self.semi_axis_y,
                       self.rotation + theta)

    def boundary_samples(self, n):
        s = 2 * np.pi * np.arange(n) / n
        local = self.semi_axis_x * np.cos(s) + 1j * self.semi_axis_y * np.sin(s)
        return self.center + np.exp(1j * self.rotation) * local

    def __repr__(self):
        return (f"Ellipse(center={self.center}, semi_axes=({self.semi_axis_x}, "
                f"{self.semi_axis_y}), rotation={self.rotation})")


class SampledSmooth(ConvexDomain):
    """Convex body bounded by a smooth closed curve sampled at uniform parameter values.

    Support queries pick the best sample through the monotone sequence of
    edge normals and then take three Newton steps on a local Taylor model of
    ``s -> Re(v w(t_j + s))``.  When the samples resolve an analytic curve the
    Taylor coefficients are spectral derivatives; otherwise a three-point
    quadratic model is used.
    """

    kind = "sampled"
    _ORDER = 8

    def __init__(self, points, params: FamilyParams | None = None, refine: str = "auto"):
        w = np.array(points, dtype=complex).ravel()
        if w.size > 1 and abs(w[-1] - w[0]) <= 1e-14 * max(np.abs(w).max(), 1.0):
            w = w[:-1]
        if w.size < 64:
            raise ValueError("a sampled boundary needs at least 64 points")
        if not np.all(np.isfinite(w)):
            raise ValueError("boundary samples must be finite")
        E = np.roll(w, -1) - w
        if np.any(np.abs(E) == 0):
            raise ValueError("repeated boundary samples")
        turn = np.angle(np.roll(E, -1) / E)
        if np.any(turn < -_CONVEXITY_TOL):
            raise ValueError(f"boundary samples are not convex (turning angle {turn.min():.3g})")
        if abs(turn.sum() - 2 * np.pi) > 1e-6:
            raise ValueError("boundary must be a simple counterclockwise curve")
        w.setflags(write=False)
        self.points = w
        self.params = params
        self.n = w.size
        self._h = 2 * np.pi / self.n
        th = np.unwrap(np.angle(-1j * E))
        self._theta = th
        if refine == "auto":
            refine = "spectral" if self._is_resolved() else "quadratic"
        if refine not in ("spectral", "quadratic"):
            raise ValueError(f"unknown refinement {refine!r}")
        self.refine = refine
        self._coef = self._taylor_coefficients()

    def _is_resolved(self) -> bool:
        c = np.abs(np.fft.fft(self.points)) / self.n
        k = np.fft.fftfreq(self.n, 1.0 / self.n)
        tail = c[np.abs(k) >= self.n // 4].max()
        return bool(tail <= 1e-11 * c.max())

    def _taylor_coefficients(self):
        # row m holds w^{(m)}(t_j) / m!
        w = self.points
        order = self._ORDER
        if self.refine == "spectral":
            hat = np.fft.fft(w)
            k = np.fft.fftfreq(self.n, 1.0 / self.n)
            if self.n % 2 == 0:
                k[self.n // 2] = 0.0
            rows = [w]
            fact = 1.0
            for m in range(1, order + 1):
                fact *= m
                rows.append(np.fft.ifft(hat * (1j * k) ** m) / fact)
            return np.array(rows)
        h = self._h
        wl, wr = np.roll(w, 1), np.roll(w, -1)
        rows = np.zeros((order + 1, self.n), dtype=complex)
        rows[0] = w
        rows[1] = (wr - wl) / (2 * h)
        rows[2] = (wr - 2 * w + wl) / (2 * h * h)
        return rows

    def _base_index(self, v):
        phi = -np.angle(v)
        th0 = self._theta[0]
        phi = th0 + np.mod(phi - th0, 2 * np.pi)
        j = np.searchsorted(self._theta, phi, side="left") % self.n
        cand = (j[:, None] + np.array([-1, 0, 1])[None, :]) % self.n
        vals = (v[:, None] * self.points[cand]).real
        return cand[np.arange(v.size), np.argmax(vals, axis=1)]

    def _support_point(self, v):
        j = self._base_index(v)
        C = self._coef[:, j]  # (order+1, m)
        order = self._ORDER
        m1 = np.arange(1, order + 1)[:, None]
        d1 = C[1:] * m1
        d2 = C[2:] * (m1[1:] * (m1[1:] - 1))
        s = np.zeros(v.size)
        h = self._h
        for _ in range(3):
            p1 = np.polynomial.polynomial.polyval(s, d1, tensor=False)
            p2 = np.polynomial.polynomial.polyval(s, d2, tensor=False)
            f1 = (v * p1).real
            f2 = (v * p2).real
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(f2 < 0, -f1 / f2, 0.0)
            s = np.clip(s + step, -h, h)
        w = np.polynomial.polynomial.polyval(s, C, tensor=False)
        base = self.points[j]
        worse = (v * w).real < (v * base).real
        return np.where(worse, base, w)

    def excess(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        return self._directional_excess(w)

    def translate(self, p):
        return SampledSmooth(self.points - complex(p), refine=self.refine)

    def scaled(self, s):
        return SampledSmooth(self.points * float(s), refine=self.refine)

    def rotated(self, theta):
        return SampledSmooth(self.points * np.exp(1j * theta), refine=self.refine)

    def boundary_samples(self, n):
        if n == self.n:
            return np.array(self.points)
        if self.refine == "spectral":
            t = 2 * np.pi * np.arange(n) / n
            hat = np.fft.fft(self.points) / self.n
            k = np.fft.fftfreq(self.n, 1.0 / self.n)
            keep = np.abs(k) < min(n, self.n) / 2
            return np.exp(1j * np.outer(t, k[keep])) @ hat[keep]
        x = np.arange(n) * self.n / n
        w = np.append(self.points, self.points[0])
        return np.interp(x, np.arange(self.n + 1), w.real) + 1j * np.interp(
            x, np.arange(self.n + 1), w.imag)

    def arc_length(self) -> float:
        """Length of the sampled curve; spectral when the samples are resolved."""
        if self.refine == "spectral":
            dw = self._coef[1]
            return float(np.abs(dw).sum() * self._h)
        return float(np.abs(np.roll(self.points, -1) - self.points).sum())

    def __repr__(self):
        return f"SampledSmooth(n={self.n}, refine={self.refine!r})"


def from_family(params: FamilyParams, n: int = 2048) -> SampledSmooth:
    """The domain ``F(D)`` of a family member, sampled at n boundary points."""
    if n < 256:
        raise ValueError("from_family needs n >= 256")
    curve = boundary_curve(params, n)
    return SampledSmooth(curve.values, params=params)
