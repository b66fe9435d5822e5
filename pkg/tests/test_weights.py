import numpy as np
import pytest

from mfcz.exceptions import MFCZInvalidParameter
from mfcz.grid.box_family import BoxFamily
from mfcz.tests.common import assert_close, make_test_domain
from mfcz.weights.characteristics import (
    a1_characteristic,
    ap_characteristic,
    class_membership,
    depth_growth,
    jn_identity_check,
    jn_refinement_check,
    rh_characteristic,
    weight_class_report,
)
from mfcz.weights.weight import (
    Weight,
    constant_weight,
    log_lipschitz_weight,
    power_weight,
    two_valued_weight,
)


@pytest.fixture
def family(domain_1d):
    return BoxFamily.dyadic(domain_1d)


@pytest.mark.parametrize("p", [1, 1.5, 2, 4])
def test_constant_weights_have_unit_characteristics(domain_1d, family, p):
    weight = constant_weight(domain_1d, 7.0)
    assert_close(ap_characteristic(weight, p, family), 1.0)
    assert_close(rh_characteristic(weight, p + 1, family), 1.0)
    assert_close(rh_characteristic(weight, np.inf, family), 1.0)


def test_ap_duality(domain_1d, family):
    weight = power_weight(domain_1d, 0.5)
    p = 3.0
    p_prime = p / (p - 1)
    dual = weight.power(1 - p_prime)
    assert_close(
        ap_characteristic(weight, p, family),
        ap_characteristic(dual, p_prime, family) ** (p - 1),
        rtol=1e-9,
    )


def test_ap_characteristic_decreases_in_p(domain_1d, family):
    weight = power_weight(domain_1d, -0.5)
    values = [ap_characteristic(weight, p, family) for p in (1, 2, 3, 6)]
    assert all(a >= b * (1 - 1e-12) for a, b in zip(values, values[1:]))
    assert values[-1] >= 1.0


def test_two_valued_weight(domain_1d, family):
    weight = two_valued_weight(domain_1d, 100.0)
    assert_close(a1_characteristic(weight, family), 50.5)
    assert_close(rh_characteristic(weight, np.inf, family), 100.0 / 50.5)
    with pytest.raises(MFCZInvalidParameter):
        two_valued_weight(domain_1d, 0.0)


def test_characteristic_errors(domain_1d, family):
    weight = constant_weight(domain_1d)
    for p in (0.5, np.inf):
        with pytest.raises(MFCZInvalidParameter):
            ap_characteristic(weight, p, family)
    with pytest.raises(MFCZInvalidParameter):
        rh_characteristic(weight, 1.0, family)


def test_weight_validation(domain_1d):
    with pytest.raises(MFCZInvalidParameter):
        Weight(domain_1d, np.zeros(64))
    values = np.ones(64)
    values[3] = 0.0
    weight = Weight(domain_1d, values)
    assert weight.has_zeros
    assert weight.floor_binds
    assert weight.values[3] > 0
    with pytest.raises(MFCZInvalidParameter):
        weight.scaled(0.0)
    assert_close(weight.scaled(2.0).raw_values, 2 * values)


def test_log_lipschitz_weight(domain_1d, rng):
    weight = log_lipschitz_weight(domain_1d, rng, amplitude=2.0)
    logs = np.log(weight.raw_values)
    assert np.all(np.abs(np.diff(logs)) <= 2.0 * domain_1d.spacing * (1 + 1e-9))


def test_power_weight_distance(domain_1d):
    weight = power_weight(domain_1d, 1.0)
    assert_close(weight.raw_values[32], domain_1d.spacing)
    assert_close(weight.raw_values[0], np.pi)


def test_jn_identity_check_for_a_constant(domain_1d, family):
    report = jn_identity_check(constant_weight(domain_1d), 2.0, 3.0, family)
    assert report.left_member and report.right_member and report.agree
    assert_close(report.power_char, 1.0)
    with pytest.raises(MFCZInvalidParameter):
        jn_identity_check(constant_weight(domain_1d), 1.0, 3.0, family)


def test_jn_refinement_member():
    domains = [make_test_domain(m) for m in (128, 256, 512, 1024)]
    report = jn_refinement_check(lambda d: power_weight(d, 0.5), domains, 2.0, 3.0)
    assert report.table["points_per_dim"].tolist() == [128, 256, 512, 1024]
    assert report.left_member and report.right_member and report.agree


def test_jn_refinement_non_member():
    domains = [make_test_domain(m) for m in (128, 256, 512, 1024)]
    report = jn_refinement_check(lambda d: power_weight(d, -0.8), domains, 2.0, 3.0)
    assert report.ap_slope <= report.slope_tolerance
    assert report.rh_slope > report.slope_tolerance
    assert report.power_slope > 1.0
    assert not report.left_member and not report.right_member
    assert report.agree
    with pytest.raises(MFCZInvalidParameter):
        jn_refinement_check(constant_weight, domains[:1], 2.0, 3.0)


def test_depth_growth_of_a_constant(domain_1d):
    table = depth_growth(constant_weight(domain_1d), ap_characteristic, p=2)
    assert table["depth"].tolist() == [1, 2, 3, 4, 5, 6]
    assert_close(table["value"].to_numpy(), 1.0)
    assert_close(table.attrs["slope"], 0.0, atol=1e-12)
    short = depth_growth(constant_weight(domain_1d), a1_characteristic, max_depth=1)
    assert np.isnan(short.attrs["slope"])


def test_weight_class_report(domain_1d, family):
    report = weight_class_report(constant_weight(domain_1d), 4, 2, 1, family)
    assert report.member
    assert np.isinf(report.t_prime)
    assert report.num_boxes == len(family)
    assert "tiles of 32 points" in report.family
    with pytest.raises(MFCZInvalidParameter):
        weight_class_report(constant_weight(domain_1d), 1, 2, 1, family)


def test_class_membership(domain_1d, family):
    report = class_membership(power_weight(domain_1d, 0.5), 3, 1, 6, family)
    assert report.s == 1
    assert report.t == 2
    assert_close(report.t_prime, 2.0)
    with pytest.raises(MFCZInvalidParameter):
        class_membership(constant_weight(domain_1d), 3, 3, 6, family)
    with pytest.raises(MFCZInvalidParameter):
        class_membership(constant_weight(domain_1d), 3, 1, np.inf, family)
