"""Sampled shape properties of lambda1 along segments of admissible densities."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from eigendesign.design import DensityField, VolumeConstraint, project_to_admissible, solve_state
from eigendesign.fem import build_disk_mesh, build_dofmap
from eigendesign.schemas import ProblemSpec, SolverSettings, Variant

MESH = build_disk_mesh(16)
DOFMAP = build_dofmap(MESH)
VC = VolumeConstraint.from_fraction(MESH, 0.5)
SOLVER = SolverSettings(eig_tol=1e-12)
TOL = 1e-9

seeds = st.integers(min_value=0, max_value=2**32 - 1)
weights = st.floats(min_value=0.05, max_value=0.95)


def _segment(seed: int, t: float, spec: ProblemSpec):
    rng = np.random.default_rng(seed)
    a = project_to_admissible(DensityField(rng.uniform(-0.5, 1.5, MESH.n_triangles), MESH), VC)
    b = project_to_admissible(DensityField(rng.uniform(-0.5, 1.5, MESH.n_triangles), MESH), VC)
    mid = DensityField(t * a.values + (1 - t) * b.values, MESH)
    return [solve_state(DOFMAP, theta, spec, SOLVER).lambda1 for theta in (a, b, mid)]


@settings(max_examples=20, deadline=None)
@given(seeds, weights)
def test_both_phases_quasiconcave(seed, t):
    lam_a, lam_b, lam_mid = _segment(seed, t, ProblemSpec())
    assert lam_mid >= min(lam_a, lam_b) * (1 - TOL)


@settings(max_examples=20, deadline=None)
@given(seeds, weights)
def test_numerator_only_concave(seed, t):
    lam_a, lam_b, lam_mid = _segment(seed, t, ProblemSpec(variant=Variant.MAX_NUMERATOR_ONLY))
    assert lam_mid >= (t * lam_a + (1 - t) * lam_b) * (1 - TOL)


@settings(max_examples=20, deadline=None)
@given(seeds, weights)
def test_denominator_only_reciprocal_convex(seed, t):
    lam_a, lam_b, lam_mid = _segment(seed, t, ProblemSpec(variant=Variant.MIN_DENOMINATOR_ONLY))
    assert 1 / lam_mid <= (t / lam_a + (1 - t) / lam_b) * (1 + TOL)
