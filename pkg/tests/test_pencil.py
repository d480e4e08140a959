import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigendesign.exceptions import PencilError
from eigendesign.pencil import (
    MatrixPencil,
    PencilSuite,
    batch_lambda1,
    check_extreme_point_minimizer,
    check_pseudoconcavity,
    check_stationary_is_global,
    multiplicity_two_pencil,
    pencil_lambda1,
    quadratic_control_pencil,
    random_affine_pencil,
    run_pencil_suite,
    sample_clarke_subgradients,
)


@pytest.fixture
def affine(rng):
    return random_affine_pencil(rng, n=5, p=2)


@pytest.fixture
def constrained(rng):
    return random_affine_pencil(rng, n=4, p=3, equality=True)


def test_random_pencils_positive_definite_on_feasible_set(constrained, rng):
    points = np.vstack([constrained.vertices(), constrained.sample(rng, 200)])
    assert np.all(batch_lambda1(constrained, points) > 0)


def test_batch_and_single_solves_agree(affine, rng):
    points = affine.sample(rng, 25)
    batched = batch_lambda1(affine, points)
    single = [pencil_lambda1(affine, theta)[0] for theta in points]
    assert np.allclose(batched, single, rtol=1e-10)


def test_vertices_of_constrained_box(constrained):
    vertices = constrained.vertices()
    assert all(constrained.contains(v) for v in vertices)
    # the plane sum = 3/2 cuts the 3-cube in a hexagon
    assert len(vertices) == 6


def test_projection_lands_in_feasible_set(constrained, rng):
    projected = constrained.project(rng.uniform(-2, 3, size=(50, 3)))
    assert all(constrained.contains(theta) for theta in projected)
    assert np.allclose(constrained.project(projected), projected, atol=1e-12)


def test_subgradient_matches_directional_derivative(affine, rng):
    h = 1e-6
    for theta in affine.sample(rng, 10):
        sample = sample_clarke_subgradients(affine, theta, n_samples=4, rng=rng)
        if sample.multiplicity != 1:
            continue
        d = rng.standard_normal(affine.p)
        fd = (pencil_lambda1(affine, theta + h * d)[0] - pencil_lambda1(affine, theta - h * d)[0]) / (2 * h)
        assert sample.subgradients[0] @ d == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_double_eigenvalue_at_degenerate_point(rng):
    pencil = multiplicity_two_pencil(rng, n=5, p=2)
    lam, basis = pencil_lambda1(pencil, pencil.degenerate_point)
    assert basis.shape[1] == 2
    assert lam == pytest.approx(1.0, rel=1e-10)
    sample = sample_clarke_subgradients(pencil, pencil.degenerate_point, n_samples=8, rng=rng)
    assert sample.subgradients.shape == (2 + 1 + 8, 2)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.1, max_value=10.0))
def test_scaling_numerator_scales_eigenvalue(factor):
    pencil = random_affine_pencil(np.random.default_rng(5), n=4, p=2)
    theta = np.array([0.3, 0.6])
    assert pencil_lambda1(pencil.scaled(factor), theta)[0] == pytest.approx(factor * pencil_lambda1(pencil, theta)[0], rel=1e-10)


def test_affine_pencils_show_no_violations(rng):
    for pencil in (random_affine_pencil(rng, 6, 3), multiplicity_two_pencil(rng, 4, 2)):
        report = check_pseudoconcavity(pencil, n_trials=200, seed=3)
        assert report.violations == 0
        assert report.tested > 0
        assert report.min_margin > 0


def test_control_pencil_shows_violations(rng):
    report = check_pseudoconcavity(quadratic_control_pencil(rng), n_trials=200, seed=3)
    assert report.violations > 0


def test_trial_records(rng):
    records = []
    report = check_pseudoconcavity(random_affine_pencil(rng, 3, 1), n_trials=30, seed=0, records=records)
    assert len(records) == 30
    assert sum(r.status == "skipped" for r in records) == report.skipped


def test_vertex_minimum(rng):
    report = check_extreme_point_minimizer(random_affine_pencil(rng, 4, 2, equality=True), grid_density=1001)
    assert report.passed
    assert report.n_vertices == 2


def test_projected_ascent_reaches_grid_maximum(rng):
    report = check_stationary_is_global(random_affine_pencil(rng, 3, 2), n_starts=8, seed=1)
    assert report.passed, report


def test_brute_force_dimension_limit(rng):
    with pytest.raises(PencilError):
        check_extreme_point_minimizer(random_affine_pencil(rng, 3, 4))


def test_invalid_pencils():
    eye = np.eye(2)
    with pytest.raises(PencilError):
        MatrixPencil(A0=eye, A=eye[None], B0=eye, B=eye[None], lower=[0], upper=[1], weights=[1.0])
    with pytest.raises(PencilError):
        MatrixPencil(A0=eye, A=eye[None], B0=eye, B=eye[None], lower=[0], upper=[1], weights=[1.0], target=2.0)
    with pytest.raises(PencilError):
        MatrixPencil(A0=np.array([[1.0, 2.0], [0.0, 1.0]]), A=eye[None], B0=eye, B=eye[None], lower=[0], upper=[1])


def _fixed_pencil(A0, A1, lower=0.0, upper=1.0) -> MatrixPencil:
    n = len(A0)
    return MatrixPencil(
        A0=np.asarray(A0, dtype=float),
        A=np.asarray(A1, dtype=float)[None],
        B0=np.eye(n),
        B=np.zeros((1, n, n)),
        lower=[lower],
        upper=[upper],
    )


def test_scaled_identity_has_unit_subgradients(rng):
    pencil = _fixed_pencil(np.eye(2), np.eye(2))
    sample = sample_clarke_subgradients(pencil, [0.5], n_samples=32, rng=rng)
    assert sample.lambda1 == pytest.approx(1.5)
    assert sample.multiplicity == 2
    assert np.allclose(sample.subgradients, 1.0)


def test_split_double_eigenvalue_fills_subgradient_interval(rng):
    pencil = _fixed_pencil(2.0 * np.eye(2), np.diag([1.0, -1.0]))
    sample = sample_clarke_subgradients(pencil, [0.0], n_samples=2000, rng=rng)
    assert sample.multiplicity == 2
    values = sample.subgradients[:, 0]
    assert values.min() >= -1.0 - 1e-12 and values.max() <= 1.0 + 1e-12
    assert values.min() < -0.99 and values.max() > 0.99


def test_diagonal_ascent_reaches_upper_eigenvalue():
    pencil = _fixed_pencil(np.diag([1.0, 2.0]), np.diag([1.0, 0.0]))
    report = check_stationary_is_global(pencil, n_starts=5, seed=0)
    assert report.grid_max == pytest.approx(2.0)
    assert report.worst_terminal == pytest.approx(2.0, rel=1e-4)
    assert report.passed


def test_constant_pencil_vertex_minimum_equals_grid_minimum():
    A0 = np.array([[3.0, 1.0], [1.0, 2.0]])
    pencil = MatrixPencil(A0=A0, A=np.zeros((2, 2, 2)), B0=np.eye(2), B=np.zeros((2, 2, 2)), lower=[0, 0], upper=[1, 1])
    report = check_extreme_point_minimizer(pencil, grid_density=51)
    assert report.passed
    assert report.vertex_min == pytest.approx(report.grid_min, rel=1e-12)


def test_eigenvalue_bounds_random_rayleigh_quotients(rng):
    pencil = random_affine_pencil(rng, n=6, p=3)
    theta = pencil.sample(rng, 1)[0]
    lam, basis = pencil_lambda1(pencil, theta)
    A, B = pencil.matrices(theta)
    u = rng.standard_normal((100_000, 6))
    quotients = np.einsum("ki,ij,kj->k", u, A, u) / np.einsum("ki,ij,kj->k", u, B, u)
    assert lam <= quotients.min() * (1 + 1e-10)
    v = basis[:, 0]
    assert (v @ A @ v) / (v @ B @ v) == pytest.approx(lam, rel=1e-10)


def test_pseudoconcavity_verdicts_survive_scaling(rng):
    pencil = random_affine_pencil(rng, n=5, p=2)
    plain = check_pseudoconcavity(pencil, n_trials=100, seed=7)
    doubled = check_pseudoconcavity(pencil.scaled(2.0), n_trials=100, seed=7)
    assert (doubled.tested, doubled.skipped, doubled.violations) == (plain.tested, plain.skipped, plain.violations)
    assert doubled.margins == pytest.approx([2.0 * m for m in plain.margins], rel=1e-6, abs=1e-10)


@pytest.mark.parametrize("name", ["ascent-2", "ascent-3", "ascent-7"])
def test_equality_constrained_ascent_reaches_grid_maximum(name):
    suite = PencilSuite(seed=42)
    stationary = suite.pencils()[3]
    index = [pencil.name for pencil in stationary].index(name)
    pencil = stationary[index]
    assert pencil.weights is not None
    report = check_stationary_is_global(pencil, n_starts=20, seed=42 + index)
    assert report.passed, report


def test_small_suite():
    suite = PencilSuite(seed=11, trials=40, n_extreme=2, n_stationary=3, n_starts=5, grid_density=201)
    report, records = suite.run()
    assert report.violations == 0
    assert report.control.violations > 0
    assert len(report.pseudoconcavity) == 11
    assert all(r.passed for r in report.extreme_point)
    assert all(r.passed for r in report.stationary)
    assert report.passed
    assert len(records) == 40 * 12


@pytest.mark.slow
def test_full_suite():
    report, _ = run_pencil_suite(seed=42, trials=1000)
    assert report.violations == 0
    assert report.passed
