import numpy as np
import pytest

from harmonic_extremal.convex_domain import Disc, Ellipse, Polygon, from_family
from harmonic_extremal.disc_harmonics import BoundaryFunction, moments
from harmonic_extremal.extremal_solver import (
    DualPoint,
    SolverError,
    classify_exceptional,
    dual_gradient,
    dual_objective,
    lower_bound_certificate,
    reconstruct_extremal,
    solve,
)
from harmonic_extremal.quadratic_family import FamilyParams, boundary_curve
from oracles import (
    batched_dual,
    grid_search_dual,
    random_convex_polygon,
    random_family,
    square_sc_boundary,
)

SQUARE = Polygon([1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j])
ARCTAN = FamilyParams(0, 0.5, 1.0)
FAMILY = from_family(ARCTAN, 4096)


def test_dual_objective_examples():
    assert dual_objective(Disc(), DualPoint()) == pytest.approx(1, abs=1e-14)
    assert dual_objective(FAMILY, DualPoint(0, 0.5), 4096) == pytest.approx(1, abs=1e-10)
    assert dual_objective(Disc(), DualPoint(1, 0)) == pytest.approx(4 / np.pi, abs=1e-6)


def test_dual_objective_requires_interior_origin():
    with pytest.raises(SolverError):
        dual_objective(Disc(1, 1), DualPoint())
    with pytest.raises(SolverError):
        solve(Disc(), p=1.0)


def test_dual_gradient_examples():
    ga, gl = dual_gradient(Disc(), DualPoint())
    assert abs(ga) < 1e-15 and abs(gl) < 1e-15
    ga, gl = dual_gradient(FAMILY, DualPoint(0, 0.5), 4096)
    assert abs(ga) < 1e-9 and abs(gl) < 1e-9


def _smooth_domains():
    rng = np.random.default_rng(30)
    return [Disc(0.1, 1.2), Ellipse(0.2j, 2, 1, 0.4), FAMILY, from_family(random_family(rng), 2048)]


def test_dual_gradient_matches_finite_differences():
    rng = np.random.default_rng(31)
    h = 1e-5
    probes = 0
    for D in _smooth_domains():
        G = batched_dual(D, 256)
        X = rng.normal(scale=0.4, size=(250, 4))
        steps = h * np.eye(4)
        plus = G((X[:, None, :] + steps[None]).reshape(-1, 4)).reshape(-1, 4)
        minus = G((X[:, None, :] - steps[None]).reshape(-1, 4)).reshape(-1, 4)
        fd = (plus - minus) / (2 * h)
        for x, f in zip(X, fd):
            ga, gl = dual_gradient(D, DualPoint.from_array(x), 256)
            g = np.array([ga.real, ga.imag, gl.real, gl.imag])
            assert np.linalg.norm(f - g) <= 1e-6 * np.linalg.norm(g), (D, x)
            probes += 1
    assert probes >= 1000


def test_dual_convexity_probes():
    rng = np.random.default_rng(32)
    for D in _smooth_domains() + [SQUARE, Polygon(random_convex_polygon(rng, 7))]:
        for _ in range(50):
            x1, x2 = rng.normal(size=4), rng.normal(size=4)
            s = rng.uniform()
            G = lambda x: dual_objective(D, DualPoint.from_array(x), 256)
            assert G(s * x1 + (1 - s) * x2) <= s * G(x1) + (1 - s) * G(x2) + 1e-10


def test_solve_examples():
    r = solve(Disc())
    assert r.M == pytest.approx(1, abs=1e-12)
    assert abs(r.dual.a) < 1e-12 and abs(r.dual.lam) < 1e-12
    r = solve(FAMILY, n=4096)
    assert r.M == pytest.approx(1, abs=1e-4)
    assert abs(r.dual.a) < 1e-3 and abs(r.dual.lam - 0.5) < 1e-3
    r = solve(Disc(), p=0.3)
    assert r.M == pytest.approx(0.91, abs=1e-4)
    assert abs(r.dual.a - 0.6) < 1e-3 and abs(r.dual.lam - 0.09) < 1e-3


def test_report_invariants():
    rng = np.random.default_rng(33)
    for D in _smooth_domains() + [SQUARE, Polygon(random_convex_polygon(rng, 6))]:
        r = solve(D)
        assert r.lower_bound <= r.M + 1e-12
        assert r.M == pytest.approx(r.lower_bound + r.duality_gap)
        m = moments(r.psi_star)
        assert r.residual_A0 == pytest.approx(abs(m.A0), abs=1e-15)
        assert r.residual_A1 == pytest.approx(abs(m.A1), abs=1e-15)
        assert r.converged
        # stationarity is feasibility
        assert max(r.residual_A0, r.residual_A1) <= 1e-8 * D.diameter()
        assert len(r.trace) >= 1 or r.method == "lp"


def test_reconstruct_extremal_examples():
    psi = reconstruct_extremal(Disc(), DualPoint(), 128)
    assert psi.values == pytest.approx(np.exp(1j * psi.t))
    psi = reconstruct_extremal(FAMILY, DualPoint(0, 0.5), 4096)
    assert np.abs(psi.values - boundary_curve(ARCTAN, 4096).values).max() < 1e-8


def test_square_selection_has_few_jump_arcs():
    r = solve(SQUARE, n=1024)
    psi = reconstruct_extremal(SQUARE, r.dual, 1024).values
    vertex = np.argmin(np.abs(psi[:, None] - SQUARE.vertices[None, :]), axis=1)
    assert np.abs(psi - SQUARE.vertices[vertex]).max() < 1e-12
    jumps = np.count_nonzero(vertex != np.roll(vertex, 1))
    assert jumps <= 4


def test_v_zero_on_grid_is_perturbed():
    # V(t) = e^{-it} + 1 vanishes at t = pi, a grid point for even n
    psi = reconstruct_extremal(Disc(), DualPoint(1, 0), 256)
    assert np.all(np.isfinite(psi.values))


def test_lower_bound_certificate_is_feasible():
    r = solve(Ellipse(0, 2, 1, 0.3))
    lb, witness = lower_bound_certificate(r.psi_star, Ellipse(0, 2, 1, 0.3).inradius(0))
    m = moments(witness)
    assert abs(m.A0) < 1e-14 and abs(m.A1) < 1e-14
    assert m.J == pytest.approx(lb)
    assert np.all(Ellipse(0, 2, 1, 0.3).contains(witness.values, 1e-12))


def test_weak_duality():
    rng = np.random.default_rng(34)
    for D in _smooth_domains() + [SQUARE]:
        r = solve(D, n=1024)
        _, witness = lower_bound_certificate(r.psi_star, D.inradius(0))
        feasible = [witness]
        # random feasible points: shrink a selection and remove its moments
        for _ in range(3):
            d = DualPoint.from_array(rng.normal(scale=0.3, size=4))
            _, w = lower_bound_certificate(reconstruct_extremal(D, d, 1024), D.inradius(0))
            feasible.append(w)
        for psi in feasible:
            m = moments(psi)
            assert max(abs(m.A0), abs(m.A1)) <= 1e-9
            for _ in range(10):
                d = DualPoint.from_array(rng.normal(size=4))
                assert m.J <= dual_objective(D, d, 1024) + 1e-8


def test_perimeter_bound():
    rng = np.random.default_rng(35)
    domains = _smooth_domains() + [SQUARE, Disc(0.3, 1), Ellipse(0, 3, 0.5, 1.0)]
    domains += [Polygon(random_convex_polygon(rng, 8)) for _ in range(3)]
    for D in domains:
        assert solve(D).M <= D.perimeter() / (2 * np.pi) + 1e-6


def test_rotation_covariance():
    # rotating the target by theta moves F to e^{i theta} F(e^{-i theta} z)
    n = 2048
    base = solve(FAMILY, n=n)
    for k in (1, 128, 300):
        theta = 2 * np.pi * k / n
        R = FAMILY.rotated(theta)
        r = solve(R, n=n)
        assert r.M == pytest.approx(base.M, abs=1e-8)
        assert abs(r.dual.a - base.dual.a * np.exp(-1j * theta)) < 1e-6
        assert abs(r.dual.lam - base.dual.lam * np.exp(-2j * theta)) < 1e-6
        expected = np.exp(1j * theta) * np.roll(base.psi_star.values, k)
        assert np.abs(r.psi_star.values - expected).max() < 1e-6
        # and the rotated extremal is extremal for the rotated dual point
        psi = reconstruct_extremal(R, r.dual, n)
        assert np.abs(psi.values - expected).max() < 1e-6


@pytest.mark.parametrize("s", [0.5, 2.0])
def test_scaling_equivariance(s):
    for D in _smooth_domains():
        r, rs = solve(D), solve(D.scaled(s))
        assert rs.M == pytest.approx(s * r.M, rel=1e-7)
        assert np.abs(rs.dual.as_array() - r.dual.as_array()).max() < 1e-5
    r, rs = solve(SQUARE), solve(SQUARE.scaled(s))
    assert rs.M == pytest.approx(s * r.M, rel=1e-9)


def test_solver_agrees_with_grid_search_oracle():
    rng = np.random.default_rng(36)
    n = 256
    for D in (Ellipse(0.1, 1.5, 0.8, 0.3), Disc(0.2j, 1), Polygon(random_convex_polygon(rng, 6, 0.05))):
        x, g = grid_search_dual(batched_dual(D, n))
        r = solve(D, n=n)
        assert r.M <= g + 1e-9
        assert g - r.M < 2e-3 * r.M


def test_subgradient_method_on_polygon():
    r = solve(SQUARE, n=512, method="subgradient")
    assert r.M == pytest.approx(4 / np.pi, rel=1e-2)
    assert r.duality_gap <= 1e-2 * r.M


def test_solve_rejects_bad_arguments():
    with pytest.raises(ValueError):
        solve(Disc(), n=64)
    with pytest.raises(ValueError):
        solve(Disc(), method="newton")
    with pytest.raises(ValueError):
        solve(Disc(), method="lp")


def test_classify_examples():
    res = classify_exceptional(ARCTAN)
    assert res.exceptional
    assert abs(res.fitted.a) < 1e-6 and abs(res.fitted.lam - 0.5) < 1e-6
    assert res.fitted.c == pytest.approx(1, abs=1e-6)
    t = 2 * np.pi * np.arange(256) / 256
    res = classify_exceptional(BoundaryFunction(np.exp(1j * t)))
    assert res.exceptional
    assert abs(res.a) < 1e-10 and abs(res.lam) < 1e-10 and res.c == pytest.approx(1)


def test_classify_square_is_not_exceptional():
    res = classify_exceptional(square_sc_boundary(512))
    assert not res.exceptional
    assert res.residual > 1e-2


def test_classify_rotated_family_member():
    P = FamilyParams(0.2 - 0.1j, 0.3j, 1.5)
    phi = boundary_curve(P, 2048).values * np.exp(0.7j)
    res = classify_exceptional(phi)
    assert res.exceptional
    # the map is normalised so that Phi'(0) > 0
    assert res.rotation == pytest.approx(0.7)
    assert res.c == pytest.approx(1.5, rel=1e-8)


def test_classify_rejects_degenerate_samples():
    t = 2 * np.pi * np.arange(64) / 64
    with pytest.raises(ValueError):
        classify_exceptional(np.exp(-1j * t))
    with pytest.raises(ValueError):
        classify_exceptional(np.exp(2j * t))
