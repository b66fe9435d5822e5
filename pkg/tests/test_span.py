import numpy as np
import pytest

from mfcz.exceptions import MFCZConvergenceError, MFCZInvalidParameter, MFCZResolutionError
from mfcz.frequency.freqset import FrequencySet, arithmetic_set
from mfcz.grid.torus import Box
from mfcz.span.gram import Quadrature, SpanElement, build_gram
from mfcz.span.projection import (
    ProjectionFrame,
    l2_projection_samples,
    ls_objective,
    project_l2,
    project_ls,
)
from mfcz.span.span_constant import (
    compute_span_constant,
    even_exponent_bound,
    span_constant,
    span_constant_even_p,
    span_constant_table,
)
from mfcz.tests.common import (
    assert_close,
    lattice_theta,
    make_test_domain,
    random_grid_function,
    trig_polynomial,
)


@pytest.fixture
def domain():
    return make_test_domain(256)


@pytest.fixture
def third_box():
    """A box whose triple covers the whole circle exactly once."""
    return Box((np.pi,), np.pi / 3)


def test_grid_and_exact_gram_agree_on_the_full_circle(domain):
    theta = lattice_theta([1, 2, 5], domain)
    box = Box((np.pi,), np.pi)
    grid = build_gram(theta, box, domain)
    exact = build_gram(theta, box, quadrature=Quadrature.EXACT)
    assert_close(grid.gram, 2 * np.pi * np.eye(3), atol=1e-10)
    assert_close(exact.gram, 2 * np.pi * np.eye(3), atol=1e-10)
    assert grid.is_full_rank
    assert_close(grid.condition_estimate, 1.0)


def test_gram_of_clustered_frequencies_drops_rank():
    theta = FrequencySet([0.0, 1e-9])
    gram = build_gram(theta, Box((0.0,), 1.0), quadrature=Quadrature.EXACT)
    assert gram.rank == 1
    assert gram.clustered_pairs == [(0, 1)]


@pytest.mark.parametrize("count", [1, 2, 4, 8])
def test_orthogonal_constant_is_sqrt_n(domain, third_box, count):
    result = compute_span_constant(arithmetic_set(count), third_box, 2, domain)
    assert not result.lower_bound_only
    assert_close(result.value, np.sqrt(count), rtol=1e-9)
    assert_close(result.ratio_to_envelope, 1.0, rtol=1e-9)


def test_p1_lower_bound_dominates_p2(domain, third_box):
    theta = arithmetic_set(4)
    result = compute_span_constant(theta, third_box, 1, domain, multi_start_count=2)
    assert result.lower_bound_only
    assert result.value >= 2.0 * (1 - 1e-9)
    assert result.envelope == 4.0


def test_generic_set_stays_below_the_trivial_bound(domain, third_box):
    theta = FrequencySet([1.0, 3.0, 4.0, 9.0])
    value = span_constant(theta, third_box, 2, domain)
    assert value <= np.sqrt(4) * (1 + 1e-9)


def test_even_exponent_bound_for_arithmetic_sets(domain, third_box):
    bound = even_exponent_bound(arithmetic_set(4), third_box, 2, domain)
    assert bound.sumset_size == 7
    assert_close(bound.bound, 7**0.25, rtol=1e-9)
    assert_close(bound.cardinality_bound, 7**0.25)
    assert bound.trivial_bound == 2.0
    assert span_constant_even_p(arithmetic_set(4), third_box, 2, domain) == bound.bound


def test_span_constant_table_columns(domain, third_box):
    table = span_constant_table([arithmetic_set(1), arithmetic_set(2)], third_box, 2, domain)
    assert table.columns.tolist() == ["N", "p", "constant", "ratio_to_N_pow", "lower_bound_only"]
    assert table["N"].tolist() == [1, 2]


def test_span_constant_errors(domain, third_box):
    theta = arithmetic_set(4)
    with pytest.raises(MFCZInvalidParameter):
        compute_span_constant(theta, third_box, 3, domain)
    with pytest.raises(MFCZResolutionError, match="wraps"):
        compute_span_constant(theta, Box((np.pi,), np.pi / 2), 2, domain)
    with pytest.raises(MFCZResolutionError, match="grid points per axis"):
        compute_span_constant(theta, third_box, 2, make_test_domain(32))


def test_l2_projection_reproduces_span_elements(domain):
    theta = lattice_theta([1, 2, 5], domain)
    f = trig_polynomial(domain, theta, [1.0, 2.0j, -1.0])
    element = project_l2(f, theta, Box((np.pi,), np.pi))
    assert isinstance(element, SpanElement)
    assert_close(element.coefficients, [1.0, 2.0j, -1.0], atol=1e-10)
    assert element.objective < 1e-10
    assert_close(element.on_grid(domain), f.values, atol=1e-10)


def test_l2_projection_residual_is_orthogonal(domain, rng):
    theta = FrequencySet([0.5, 2.25, 3.0])
    f = random_grid_function(domain, rng)
    frame = ProjectionFrame.build(domain, theta, Box((2.0,), 0.5), target=Box((2.0,), 1.5))
    samples = frame.restricted(f.values)
    assert np.count_nonzero(samples) == np.count_nonzero(frame.inside)
    residual = samples - l2_projection_samples(frame, samples)
    pairings = frame.basis.conj().T @ residual
    assert np.max(np.abs(pairings)) < 1e-9 * np.linalg.norm(samples)


def test_ls_projection_improves_on_l2(domain, rng):
    theta = FrequencySet([1.0, 2.0])
    f = random_grid_function(domain, rng)
    box = Box((np.pi,), 1.0)
    l2 = project_l2(f, theta, box)
    ls = project_ls(f, theta, box, s=3, tol=1e-6)
    frame = ProjectionFrame.build(domain, theta, box)
    samples = frame.restricted(f.values)
    assert ls.objective <= ls_objective(frame, samples, l2.coefficients, 3) * (1 + 1e-12)


def test_ls_projection_errors(domain, rng):
    f = random_grid_function(domain, rng)
    theta = FrequencySet([1.0, 2.0])
    with pytest.raises(MFCZInvalidParameter):
        project_ls(f, theta, Box((np.pi,), 1.0), s=1)
    with pytest.raises(MFCZConvergenceError) as exc_info:
        project_ls(f, theta, Box((np.pi,), 1.0), s=1.2, max_iter=1)
    assert exc_info.value.best_iterate is not None
    assert exc_info.value.history
