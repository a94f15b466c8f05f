"""
Extremal constant ``M_D(p)`` of harmonic maps of the disc into a bounded
convex domain that are conformal at the origin.

With ``p`` moved to the origin, ``M_D(0)`` is the maximum of the moment
``J(psi)`` over boundary functions with values in the closed domain and
vanishing moments ``A0`` and ``A1``.  Its Lagrange dual over the multipliers
``(a, lam)`` is the convex function

    G(a, lam) = mean_t H_D(e^{-it} + a + lam e^{it}),

whose subgradient is the moment pair of the support-point selection.  The
solver minimises ``G`` on a uniform grid, rebuilds the extremal boundary
function from the support points at the minimiser and certifies the value
with a feasible primal witness.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .convex_domain import ConvexDomain, Polygon
from .disc_harmonics import DEFAULT_N, BoundaryFunction, moments
from .quadratic_family import FamilyParams, schur_cohn

__all__ = [
    "DualPoint",
    "SolveReport",
    "SolverError",
    "dual_objective",
    "dual_gradient",
    "reconstruct_extremal",
    "lower_bound_certificate",
    "solve",
    "ClassifyResult",
    "classify_exceptional",
]

log = logging.getLogger(__name__)

_INTERIOR_MARGIN = 1e-9
_V_ZERO = 1e-14
_MAX_AUTO_N = 16384


class SolverError(ValueError):
    """Invalid input to the extremal solver (e.g. base point not interior)."""


@dataclass(frozen=True)
class DualPoint:
    a: complex = 0j
    lam: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.a.real, self.a.imag, self.lam.real, self.lam.imag])

    @classmethod
    def from_array(cls, x) -> "DualPoint":
        return cls(complex(x[0], x[1]), complex(x[2], x[3]))


@dataclass
class SolveReport:
    M: float
    dual: DualPoint
    psi_star: BoundaryFunction
    residual_A0: float
    residual_A1: float
    duality_gap: float
    lower_bound: float
    iterations: int
    trace: list = field(default_factory=list)
    n: int = 0
    method: str = ""
    converged: bool = False
    # z -> f(conj z) attains the same value with reversed orientation
    orientation: str = "preserving"
    point: complex = 0j

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "dual": {"a": [self.dual.a.real, self.dual.a.imag],
                     "lambda": [self.dual.lam.real, self.dual.lam.imag]},
            "residual_A0": self.residual_A0,
            "residual_A1": self.residual_A1,
            "duality_gap": self.duality_gap,
            "lower_bound": self.lower_bound,
            "iterations": self.iterations,
            "n": self.n,
            "method": self.method,
            "converged": self.converged,
            "orientation": self.orientation,
            "reflected_extremal": "z -> f(conj(z)) attains the same value",
            "point": [self.point.real, self.point.imag],
            "trace": [{"iteration": k, "objective": g, "residual": r} for k, g, r in self.trace],
        }


def _grid(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def _V(d: DualPoint, e: np.ndarray) -> np.ndarray:
    V = np.conj(e) + d.a + d.lam * e
    # V has at most two zeros; nudge exact grid collisions off them
    bad = np.abs(V) < _V_ZERO
    if np.any(bad):
        V = np.where(bad, V + 1e-12, V)
    return V


def _check_origin(D: ConvexDomain):
    if D.inradius(0j) <= _INTERIOR_MARGIN:
        raise SolverError("the origin must be an interior point; translate the domain first")


def _evaluate(D: ConvexDomain, d: DualPoint, n: int):
    e = _grid(n)
    V = _V(d, e)
    H, w = D.support(V)
    return float(H.mean()), w


def dual_objective(D: ConvexDomain, d: DualPoint, n: int = DEFAULT_N) -> float:
    """``G(a, lam) = (1/n) sum_j H_D(V(t_j))``."""
    _check_origin(D)
    return _evaluate(D, d, n)[0]


def _gradient_from(w: np.ndarray, n: int) -> np.ndarray:
    e = _grid(n)
    A0 = w.mean()
    A1 = (e * w).mean()
    return np.array([A0.real, -A0.imag, A1.real, -A1.imag])


def dual_gradient(D: ConvexDomain, d: DualPoint, n: int = DEFAULT_N):
    """Subgradient of ``G`` as ``(g_a, g_lam)``.

    Each complex component packs the two real partials,
    ``g_a = dG/dRe(a) + i dG/dIm(a) = conj(A0(psi*))`` and likewise for lam.
    """
    _check_origin(D)
    _, w = _evaluate(D, d, n)
    g = _gradient_from(w, n)
    return complex(g[0], g[1]), complex(g[2], g[3])


def reconstruct_extremal(D: ConvexDomain, d: DualPoint, n: int = DEFAULT_N) -> BoundaryFunction:
    """Support-point selection ``psi*_j = argmax_w Re(V(t_j) w)``."""
    return BoundaryFunction(D.support_point(_V(d, _grid(n))))


def lower_bound_certificate(psi: BoundaryFunction, r: float) -> tuple[float, BoundaryFunction]:
    """Feasible witness built from a near-stationary selection.

    Subtracting ``A0 + A1 e^{-it}`` kills both offending Fourier modes
    without changing ``J``; the samples then sit within
    ``delta = |A0| + |A1|`` of the domain, and shrinking towards the origin by
    ``rho = delta / r`` (``r`` = inradius about 0) restores membership.
    Returns ``(J(witness), witness)``.
    """
    m = moments(psi)
    e = np.exp(1j * psi.t)
    corrected = psi.values - m.A0 - m.A1 * np.conj(e)
    delta = abs(m.A0) + abs(m.A1)
    rho = min(1.0, delta / r) if r > 0 else 1.0
    witness = BoundaryFunction((1.0 - rho) * corrected)
    return (1.0 - rho) * m.J, witness


def _residuals(w: np.ndarray, n: int) -> tuple[float, float]:
    e = _grid(n)
    return float(abs(w.mean())), float(abs((e * w).mean()))


def _gradient_descent(D, x, n, stop, max_iter, trace):
    f, w = _evaluate(D, DualPoint.from_array(x), n)
    g = _gradient_from(w, n)
    k = 0
    for k in range(1, max_iter + 1):
        r0, r1 = _residuals(w, n)
        trace.append((k - 1, f, max(r0, r1)))
        if max(r0, r1) <= stop:
            return x, k - 1, True
        gg = float(g @ g)
        step = 1.0
        while True:
            xn = x - step * g
            fn, wn = _evaluate(D, DualPoint.from_array(xn), n)
            if fn <= f - 1e-4 * step * gg:
                break
            step *= 0.5
            if step < 1e-12:
                log.debug("line search stalled at iteration %d", k)
                return x, k, False
        x, f, w = xn, fn, wn
        g = _gradient_from(w, n)
    r0, r1 = _residuals(w, n)
    trace.append((max_iter, f, max(r0, r1)))
    return x, max_iter, max(r0, r1) <= stop


def _subgradient(D, x, n, stop, max_iter, trace, c0=0.2):
    # normalised steps c0/sqrt(k), Polyak averaging of the second half
    best_x, best_f = x.copy(), math.inf
    avg, weight = np.zeros(4), 0.0
    converged = False
    k = 0
    for k in range(1, max_iter + 1):
        f, w = _evaluate(D, DualPoint.from_array(x), n)
        g = _gradient_from(w, n)
        r = max(_residuals(w, n))
        trace.append((k - 1, f, r))
        if f < best_f:
            best_f, best_x = f, x.copy()
        if r <= stop:
            converged = True
            break
        if k > max_iter // 2:
            avg += x
            weight += 1.0
        gn = np.linalg.norm(g)
        x = x - (c0 / math.sqrt(k)) * g / gn
    if weight > 0:
        xa = avg / weight
        fa, _ = _evaluate(D, DualPoint.from_array(xa), n)
        if fa < best_f:
            best_f, best_x = fa, xa
    return best_x, k, converged


def _polygon_lp(D: Polygon, n: int, trace):
    """Solve the polyhedral grid dual exactly as a linear program.

    Minimise ``mean(s_j)`` subject to ``s_j >= Re(V(t_j) w_k)`` for every vertex.
    The constraint multipliers split each grid weight over the maximising
    vertices, so ``n * sum_k mu_jk w_k`` is a support-point selection whose
    moments vanish by stationarity.
    """
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix, hstack

    e = _grid(n)
    W = D.vertices
    nv = W.size
    base = (np.conj(e)[:, None] * W[None, :]).real.ravel()
    ew = e[:, None] * W[None, :]
    Wb = np.broadcast_to(W[None, :], (n, nv))
    # Re(a w) = ar wr - ai wi, Re(lam e w) = lr Re(ew) - li Im(ew)
    coef_d = np.stack([Wb.real.ravel(), -Wb.imag.ravel(), ew.real.ravel(), -ew.imag.ravel()], axis=1)
    rows = np.arange(n * nv)
    S = coo_matrix((-np.ones(n * nv), (rows, np.repeat(np.arange(n), nv))), shape=(n * nv, n))
    A = hstack([coo_matrix(coef_d), S]).tocsr()
    cost = np.concatenate([np.zeros(4), np.full(n, 1.0 / n)])
    bounds = [(None, None)] * (4 + n)
    res = linprog(cost, A_ub=A, b_ub=-base, bounds=bounds, method="highs-ipm")
    if res.status != 0:
        raise RuntimeError(f"polygon LP failed: {res.message}")
    mu = -res.ineqlin.marginals.reshape(n, nv)
    mu = np.clip(mu, 0.0, None)
    mu /= mu.sum(axis=1, keepdims=True)
    w = mu @ W
    trace.append((1, float(res.fun), max(_residuals(w, n))))
    return res.x[:4], w


def _interior_check(D: ConvexDomain, p: complex):
    if D.inradius(p) <= _INTERIOR_MARGIN:
        raise SolverError(f"point {p} is not strictly inside the domain")


def _solve_grid(D0, n, tol, max_iter, x0, method):
    diam = D0.diameter()
    r = D0.inradius(0j)
    stop = tol * diam
    trace: list = []
    if method == "lp":
        x, w = _polygon_lp(D0, n, trace)
        d = DualPoint.from_array(x)
        M = float(np.mean(D0.support_value(_V(d, _grid(n)))))
        psi = BoundaryFunction(w)
        res0, res1 = _residuals(w, n)
        lb, _ = lower_bound_certificate(psi, r)
        return M, d, psi, res0, res1, lb, 1, trace, max(res0, res1) <= stop
    if method == "subgradient":
        x, iters, converged = _subgradient(D0, x0, n, stop, max_iter, trace)
    else:
        x, iters, converged = _gradient_descent(D0, x0, n, stop, max_iter, trace)
    d = DualPoint.from_array(x)
    M, w = _evaluate(D0, d, n)
    psi = BoundaryFunction(w)
    res0, res1 = _residuals(w, n)
    lb, _ = lower_bound_certificate(psi, r)
    return M, d, psi, res0, res1, lb, iters, trace, converged


def solve(D: ConvexDomain, p: complex = 0j, n: int | None = None, tol: float = 1e-8,
          max_iter: int | None = None, method: str | None = None) -> SolveReport:
    """Compute ``M_D(p)`` by minimising the dual objective.

    ``n=None`` starts from the default grid and doubles it while the
    moments of the extremal selection change by more than 1e-9 between n
    and 2n (smooth domains only).  Failure to reach ``tol`` is reported in
    the ``converged`` flag and the residuals, not raised.
    """
    p = complex(p)
    _interior_check(D, p)
    D0 = D.translate(p) if p != 0 else D
    if method is None:
        method = "lp" if isinstance(D0, Polygon) else "gradient"
    if method not in ("lp", "subgradient", "gradient"):
        raise ValueError(f"unknown method {method!r}")
    if method == "lp" and not isinstance(D0, Polygon):
        raise ValueError("the LP method needs a polygon")
    if max_iter is None:
        max_iter = 3000 if method == "subgradient" else 1000
    auto = n is None
    n = DEFAULT_N if auto else int(n)
    if n < 256:
        raise ValueError("solve needs a grid of at least 256 points")

    x0 = np.zeros(4)
    while True:
        M, d, psi, res0, res1, lb, iters, trace, conv = _solve_grid(D0, n, tol, max_iter, x0, method)
        if not auto or method != "gradient" or 2 * n > _MAX_AUTO_N:
            break
        m_n = moments(psi)
        m_2n = moments(reconstruct_extremal(D0, d, 2 * n))
        drift = max(abs(m_n.A0 - m_2n.A0), abs(m_n.A1 - m_2n.A1), abs(m_n.J - m_2n.J))
        if drift <= 1e-9:
            break
        log.info("moments drift %.3g between n=%d and 2n; doubling grid", drift, n)
        n *= 2
        x0 = d.as_array()

    if not conv:
        log.warning("solver stopped before reaching tolerance (residuals %.3g, %.3g)", res0, res1)
    return SolveReport(
        M=M, dual=d, psi_star=psi, residual_A0=res0, residual_A1=res1,
        duality_gap=M - lb, lower_bound=lb, iterations=iters, trace=trace,
        n=n, method=method, converged=conv, point=p,
    )


@dataclass(frozen=True)
class ClassifyResult:
    exceptional: bool
    fitted: FamilyParams | None
    residual: float
    a: complex
    lam: complex
    c: float
    rotation: float


def _spectral_derivative(values: np.ndarray) -> np.ndarray:
    n = values.size
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(values))


def classify_exceptional(source, tol: float = 1e-8, n: int = DEFAULT_N) -> ClassifyResult:
    """Decide whether a conformal parametrisation belongs to the quadratic family.

    ``source`` is either :class:`FamilyParams` or uniform boundary samples
    ``Phi(e^{i t_j})`` (a :class:`BoundaryFunction` or array) of a conformal map
    with ``Phi(0) = 0``.  The boundary derivative ``Phi'(e^{it})`` is recovered
    from ``dphi/dt = i e^{it} Phi'(e^{it})`` and ``(a, lam, c)`` is fitted by
    least squares to ``(1 + a e^{it} + lam e^{2it}) Phi'(e^{it}) = c``.
    The map is exceptional when the relative RMS residual is at most ``tol``
    and the fitted coefficients pass the strict Schur-Cohn test.
    """
    if isinstance(source, FamilyParams):
        from .quadratic_family import boundary_curve
        phi = boundary_curve(source, n).values
    else:
        phi = np.asarray(getattr(source, "values", source), dtype=complex).ravel()
    m = phi.size
    if m < 8 or not np.all(np.isfinite(phi)):
        raise ValueError("need at least 8 finite boundary samples")
    dang = np.angle(np.roll(phi, -1) / phi) if np.all(phi != 0) else None
    if dang is None or np.any(dang <= 0) or abs(dang.sum() - 2 * np.pi) > 1e-6:
        raise ValueError("boundary samples do not form a simple curve winding once around 0")

    e = np.exp(2j * np.pi * np.arange(m) / m)
    # rotate the target so that Phi'(0) > 0
    d0 = (np.conj(e) * phi).mean()
    rot = float(np.angle(d0))
    phi = phi * np.exp(-1j * rot)
    dphi = _spectral_derivative(phi)
    dPhi = dphi / (1j * e)

    # unknowns Re a, Im a, Re lam, Im lam, c
    cols = [e * dPhi, 1j * e * dPhi, e * e * dPhi, 1j * e * e * dPhi, -np.ones(m, dtype=complex)]
    A = np.array(cols).T
    A_real = np.vstack([A.real, A.imag])
    b = -dPhi
    b_real = np.concatenate([b.real, b.imag])
    sol, *_ = np.linalg.lstsq(A_real, b_real, rcond=None)
    a = complex(sol[0], sol[1])
    lam = complex(sol[2], sol[3])
    c = float(sol[4])
    r = (1 + a * e + lam * e * e) * dPhi - c
    residual = float(np.sqrt(np.mean(np.abs(r) ** 2)) / abs(c)) if c != 0 else math.inf

    fitted = None
    exceptional = False
    if c > 0 and schur_cohn(a, lam).zero_free:
        fitted = FamilyParams(a, lam, c)
        exceptional = residual <= tol
    return ClassifyResult(exceptional, fitted if exceptional else None, residual, a, lam, c, rot)
