import numpy as np
import pytest

from pcurves.domain import Ellipse2D, Interval2D, PolygonND
from pcurves.errors import (
    DegenerateInterval,
    InvertedBounds,
    JacobianSignViolation,
    SingularGram,
    ZeroMass,
)
from pcurves.moments import (
    MomentSet,
    gram_solve,
    moments_ellipse,
    moments_interval,
    moments_polygon,
    moments_quadrature,
    partial_moments,
    transverse_stats,
)

RNG = np.random.default_rng(99)


def random_triangle():
    while True:
        v = RNG.uniform(-2, 2, size=(3, 2))
        e1, e2 = v[1] - v[0], v[2] - v[0]
        area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
        if area > 0.05:
            return PolygonND(v)


def assert_moments_close(a: MomentSet, b: MomentSet, rtol=1e-9):
    scale = max(abs(a.mu0), np.max(np.abs(a.first)), np.max(np.abs(a.second)), 1e-30)
    assert abs(a.mu0 - b.mu0) <= rtol * scale
    assert np.max(np.abs(a.first - b.first)) <= rtol * scale
    assert np.max(np.abs(a.second - b.second)) <= rtol * scale


def test_interval_examples():
    m = moments_interval(-1.0, 1.0)
    assert (m.mu0, m.first[0], m.second[0, 0]) == (2.0, 0.0, pytest.approx(2.0 / 3.0))
    st = transverse_stats(m)
    assert st.mean[0] == 0.0
    assert st.cov[0, 0] == pytest.approx(1.0 / 3.0)  # w^2 / 12 with w = 2

    m = moments_interval(0.0, 1.0)
    assert (m.mu0, m.first[0]) == (1.0, 0.5)
    assert m.second[0, 0] == pytest.approx(1.0 / 3.0)
    assert transverse_stats(m).cov[0, 0] == pytest.approx(1.0 / 12.0)

    st = transverse_stats(moments_interval(1.0, 3.0))
    assert st.mean[0] == pytest.approx(2.0)
    assert st.cov[0, 0] == pytest.approx(4.0 / 12.0)

    with pytest.raises(DegenerateInterval):
        moments_interval(1.0, 1.0)


def test_partial_moments_unit_square():
    pm = partial_moments(0.0, 0.0, 1.0, 0.0, 0.0, 1.0)
    assert pm.m10 == pytest.approx(0.5)
    assert pm.m20 == pytest.approx(1.0 / 3.0)
    assert pm.m11 == pytest.approx(0.25)
    assert pm.m01 == pytest.approx(0.5)
    assert pm.m02 == pytest.approx(1.0 / 3.0)


def test_partial_moments_unit_triangle():
    pm = partial_moments(0.0, 0.0, 1.0, -1.0, 0.0, 1.0)
    assert pm.m10 == pytest.approx(1.0 / 6.0)
    assert pm.m01 == pytest.approx(1.0 / 6.0)


def test_partial_moments_match_quadrature():
    # strip integrals against the generic 2-d oracle on randomized bounds
    for _ in range(40):
        v1, dv = RNG.uniform(-1.5, 1.0), RNG.uniform(0.3, 1.5)
        v2 = v1 + dv
        a, b = RNG.uniform(-1, 0.2), RNG.uniform(-0.8, 0.8)
        gap = RNG.uniform(0.2, 1.5)
        c, d = a + gap, b + RNG.uniform(-0.3, 0.3)
        if (a + b * v1 > c + d * v1) or (a + b * v2 > c + d * v2):
            continue
        corners = np.array(
            [[v1, a + b * v1], [v2, a + b * v2], [v2, c + d * v2], [v1, c + d * v1]]
        )
        sec = PolygonND(corners)
        mq = moments_quadrature(sec)
        pm = partial_moments(a, b, c, d, v1, v2)
        assert abs(pm.m10 - mq.first[0]) < 1e-10
        assert abs(pm.m01 - mq.first[1]) < 1e-10
        assert abs(pm.m20 - mq.second[0, 0]) < 1e-10
        assert abs(pm.m11 - mq.second[0, 1]) < 1e-10
        assert abs(pm.m02 - mq.second[1, 1]) < 1e-10
    with pytest.raises(InvertedBounds):
        partial_moments(0.0, 0.0, 1.0, 0.0, 1.0, 0.0)
    with pytest.raises(InvertedBounds):
        partial_moments(1.0, 0.0, 0.0, 0.0, 0.0, 1.0)


def test_polygon_unit_square():
    m = moments_polygon(PolygonND(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)))
    assert m.mu0 == pytest.approx(1.0)
    assert np.allclose(m.first, [0.5, 0.5])
    assert np.allclose(m.second, [[1 / 3, 1 / 4], [1 / 4, 1 / 3]])


def test_polygon_triangle_matches_oracle():
    tri = PolygonND(np.array([[0, 0], [1, 0], [0, 1]], dtype=float))
    assert_moments_close(moments_polygon(tri), moments_quadrature(tri))
    assert moments_polygon(tri).mu0 == pytest.approx(0.5)
    assert np.allclose(moments_polygon(tri).first, [1 / 6, 1 / 6])


def test_polygon_translation_covariance():
    sq = PolygonND(np.array([[1, 1], [2, 1], [2, 2], [1, 2]], dtype=float))
    m = moments_polygon(sq)
    st = transverse_stats(m)
    assert np.allclose(st.mean, [1.5, 1.5])
    assert np.allclose(st.cov, np.diag([1 / 12, 1 / 12]))


def test_ellipse_disk_moments():
    m = moments_ellipse(Ellipse2D((0.0, 0.0), (1.0, 1.0)))
    assert m.mu0 == pytest.approx(np.pi)
    assert np.allclose(m.first, 0.0)
    assert np.allclose(m.second, np.diag([np.pi / 4, np.pi / 4]))


def test_ellipse_weighted_mean_principal_pitch():
    # b = r/2 makes the weighted transverse mean vanish
    a, b, r = 0.2, 0.5, 1.0
    k2 = 1.0 / (a * a + b * b)
    kappa = a * k2
    bk = b * np.sqrt(k2)
    m = moments_ellipse(Ellipse2D((a, 0.0), (r, r / bk)), weight=kappa)
    assert abs(m.first[0] / m.mu0) < 1e-14
    assert abs(m.first[1] / m.mu0) < 1e-14


def test_ellipse_weighted_mean_generic():
    a, b, r = 0.2, 1.0, 1.0
    k2 = 1.0 / (a * a + b * b)
    kappa = a * k2
    bk = b * np.sqrt(k2)
    sec = Ellipse2D((a, 0.0), (r, r / bk))
    m = moments_ellipse(sec, weight=kappa)
    assert m.first[0] / m.mu0 == pytest.approx(0.15, abs=1e-12)
    mq = moments_quadrature(sec, jacobian_weight=np.array([kappa, 0.0]))
    assert mq.first[0] / mq.mu0 == pytest.approx(0.15, abs=1e-9)


def test_ellipse_weight_sign_violation():
    with pytest.raises(JacobianSignViolation):
        moments_ellipse(Ellipse2D((0.0, 0.0), (1.0, 1.0)), weight=2.0)


def test_quadrature_matches_polygon_randomized():
    for _ in range(100):
        tri = random_triangle()
        assert_moments_close(moments_polygon(tri), moments_quadrature(tri))


def test_quadrature_thin_rectangle_interval_limit():
    eps = 1e-3
    rect = PolygonND(np.array([[-0.7, -eps / 2], [0.3, -eps / 2], [0.3, eps / 2], [-0.7, eps / 2]]))
    m2 = moments_quadrature(rect)
    m1 = moments_interval(-0.7, 0.3)
    assert m2.mu0 / eps == pytest.approx(m1.mu0, rel=1e-9)
    assert m2.first[0] / eps == pytest.approx(m1.first[0], rel=1e-9)
    assert m2.second[0, 0] / eps == pytest.approx(m1.second[0, 0], rel=1e-9)


def test_quadrature_unit_square_mass():
    sq = PolygonND(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))
    assert moments_quadrature(sq).mu0 == pytest.approx(1.0, abs=1e-12)


def test_quadrature_density_callback():
    sq = PolygonND(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))
    m = moments_quadrature(sq, density=lambda u: u[:, 0])
    assert m.mu0 == pytest.approx(0.5, abs=1e-10)  # integral of u1 over the square
    assert m.first[0] == pytest.approx(1.0 / 3.0, abs=1e-10)


def test_gram_solve_symmetric_section_is_straight():
    m = moments_interval(-1.0, 1.0)
    assert gram_solve(m).kappa[0] == 0.0


def test_gram_solve_interval_example():
    assert gram_solve(moments_interval(0.0, 1.0)).kappa[0] == pytest.approx(1.5)


def test_gram_solve_stats_identity():
    for _ in range(50):
        tri = random_triangle()
        m = moments_polygon(tri)
        kappa = gram_solve(m).kappa
        st = transverse_stats(m)
        alt = np.linalg.solve(st.cov + np.outer(st.mean, st.mean), st.mean)
        assert np.allclose(kappa, alt, atol=1e-12 * max(1.0, np.abs(kappa).max()))


def test_gram_solve_singular():
    bad = MomentSet(1.0, np.array([0.1, 0.1]), np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularGram):
        gram_solve(bad)


def test_transverse_stats_zero_mass():
    with pytest.raises(ZeroMass):
        transverse_stats(MomentSet(0.0, np.zeros(1), np.eye(1)))


def test_transverse_stats_consistency_invariant():
    for _ in range(50):
        tri = random_triangle()
        m = moments_polygon(tri)
        st = transverse_stats(m)
        lhs = st.cov + np.outer(st.mean, st.mean)
        assert np.allclose(lhs, m.second / m.mu0, atol=1e-10)
        eig = np.linalg.eigvalsh(st.cov)
        assert eig.min() > -1e-10


def test_scaling_law():
    tri = random_triangle()
    m1 = moments_polygon(tri)
    for t in (0.5, 2.0):
        mt = moments_polygon(PolygonND(tri.vertices * t))
        assert mt.mu0 == pytest.approx(t**2 * m1.mu0)
        assert np.allclose(mt.first, t**3 * m1.first)
        assert np.allclose(mt.second, t**4 * m1.second)


def test_gram_spd_on_random_sections():
    for _ in range(100):
        tri = random_triangle()
        m = moments_polygon(tri)
        assert np.linalg.eigvalsh(m.second).min() > 0
