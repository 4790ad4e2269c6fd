from fractions import Fraction

import pytest

import ecstab


def test_point_counts():
    assert ecstab.count_points(5, 1, 1) == 9
    assert ecstab.count_points(7, 1, 1) == 5
    assert ecstab.count_points(13, 1, 1) == 18
    assert ecstab.reduction_type(1, 1, 31) == "multiplicative_nonsplit"


def test_bad_input_raises():
    with pytest.raises(ValueError):
        ecstab.count_points(5, -3, 2)


def test_extension():
    chi = ecstab.build_split_extension([2], [7, 13], 3)
    assert chi["exponents"] == [1, 1]
    assert ecstab.character_value(chi, 2) == 0


def test_formulas():
    assert ecstab.kida_lambda(3, 1, [3], []) == 5
    assert ecstab.kida_lambda(3, 0, [], [3, 3]) == 8
    assert ecstab.euler_characteristic_valuation(sha=1) == 1
    assert ecstab.s_density(5, 1) == Fraction(19, 96)
    assert ecstab.sl2_trace_count(5) == (95, 95)
    cs, en = ecstab.count_tp(7)
    assert cs == en


def test_series():
    value, bound = ecstab.delaunay_proportion(11)
    assert abs(value - 0.0457988) < 1e-6
    assert bound < 1e-12
    lb = ecstab.lower_bound_density(10**9 + 7)
    assert abs(lb["value"] - 1 / 6) < 1e-2


def test_certificate_round_trip():
    cert = ecstab.certify(13, split=[2, 7], label="14a1")
    assert all(c["asserted"] for c in cert["conclusions"])
    ok, items = ecstab.verify_certificate(cert)
    assert ok
    cert["character"]["exponents"][0] += 1
    ok, _ = ecstab.verify_certificate(cert)
    assert not ok


def test_cli_entry():
    code, out, _ = ecstab.run_command(["sl2", "--p", "5"])
    assert code == 0
    assert out == "95 95 match\n"
