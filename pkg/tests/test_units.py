from fractions import Fraction

import pytest

from linkact.units import (
    db_to_linear,
    dbm_to_watts,
    gain_from_distance,
    linear_to_db,
    watts_to_dbm,
)


def test_gain_identity_and_known_points():
    assert gain_from_distance(1.0, 4.0) == 1.0
    assert gain_from_distance(100.0, 4.0) == pytest.approx(1e-8, rel=1e-12)


def test_gain_matches_exact_rational_arithmetic():
    exact = float(Fraction(1, 200**4))
    assert gain_from_distance(200.0, 4.0) == pytest.approx(exact, rel=1e-15)


def test_gain_rejects_nonpositive_distance():
    with pytest.raises(ValueError):
        gain_from_distance(0.0)
    with pytest.raises(ValueError):
        gain_from_distance(-3.0)


def test_dbm_to_watts():
    assert dbm_to_watts(30.0) == 1.0
    assert dbm_to_watts(-100.0) == pytest.approx(1e-13, rel=1e-12)
    assert dbm_to_watts(0.0) == pytest.approx(1e-3, rel=1e-12)


def test_db_to_linear():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(-6.0) == pytest.approx(0.251188643150958, rel=1e-12)


def test_round_trips():
    assert linear_to_db(db_to_linear(-7.3)) == pytest.approx(-7.3, abs=1e-12)
    assert watts_to_dbm(dbm_to_watts(17.5)) == pytest.approx(17.5, abs=1e-12)


def test_log_of_nonpositive_rejected():
    with pytest.raises(ValueError):
        linear_to_db(0.0)
    with pytest.raises(ValueError):
        watts_to_dbm(-1.0)
