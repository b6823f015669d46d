import json
import math

import pytest
from hypothesis import given, strategies as st

from oscillator_laser.errors import ParameterError
from oscillator_laser.params import (
    LaserParams,
    Regime,
    derive_rates,
    inverse_threshold,
    load_params,
    params_from_mapping,
    params_to_mapping,
    threshold_inversion,
    validate,
)


def make(**kw):
    base = dict(omega_rabi=34.0, kappa=50.0, gamma_perp=50.0, pump=0.7, n_emitters=100, coupling_f=0.5)
    base.update(kw)
    return LaserParams(**base)


def test_threshold_inversion_value():
    # kappa gamma_perp / (2 Omega^2 f) = 2500 / 1156
    assert threshold_inversion(validate(make())) == pytest.approx(2500 / 1156, rel=1e-15)


def test_threshold_infinite_without_coupling():
    p = validate(make(omega_rabi=0.0))
    assert inverse_threshold(p) == 0.0
    assert threshold_inversion(p) == math.inf


@pytest.mark.parametrize("gamma_perp,regime", [(50.0, Regime.SUPERRADIANT), (100.0, Regime.SUPERRADIANT),
                                               (200.0, Regime.NON_SUPERRADIANT), (3000.0, Regime.NON_SUPERRADIANT)])
def test_regime(gamma_perp, regime):
    assert derive_rates(validate(make(gamma_perp=gamma_perp))).regime is regime


def test_gamma_p():
    assert derive_rates(validate(make(pump=2.5))).gamma_p == 3.5


def test_all_violations_collected():
    with pytest.raises(ParameterError) as info:
        validate(make(kappa=0.0, pump=-1.0, n_emitters=0, coupling_f=1.5, units="furlongs"))
    assert sorted(info.value.codes) == sorted(
        ["NonPositiveRate", "NegativePump", "ZeroEmitters", "CouplingOutOfRange", "UnknownUnits"])


@pytest.mark.parametrize("field,value,code", [
    ("gamma_perp", -1.0, "NonPositiveRate"),
    ("gamma_par", 0.0, "NonPositiveRate"),
    ("omega_rabi", -0.1, "NonPositiveRate"),
    ("omega_rabi", math.nan, "NonPositiveRate"),
    ("n_emitters", 2.5, "ZeroEmitters"),
    ("coupling_f", 0.0, "CouplingOutOfRange"),
    ("pump", math.inf, "NegativePump"),
])
def test_single_violation(field, value, code):
    with pytest.raises(ParameterError) as info:
        validate(make(**{field: value}))
    assert info.value.codes == [code]


def test_rad_per_s_normalization():
    p = validate(make(omega_rabi=34e9, kappa=50e9, gamma_perp=100e9, gamma_par=1e9, units="rad_per_s"))
    assert (p.omega_rabi, p.kappa, p.gamma_perp) == pytest.approx((34.0, 50.0, 100.0))
    assert p.rate_scale == 1e9


@given(gpar=st.floats(0.1, 10.0), om=st.floats(0.0, 100.0), k=st.floats(0.1, 100.0))
def test_validate_idempotent(gpar, om, k):
    p = validate(make(omega_rabi=om, kappa=k, gamma_par=gpar))
    assert validate(p) == p
    assert p.gamma_par == 1.0


def test_with_revalidates():
    p = validate(make())
    assert p.with_(pump=2.0).pump == 2.0
    with pytest.raises(ParameterError):
        p.with_(kappa=-1.0)


def test_mapping_round_trip(tmp_path):
    p = validate(make())
    path = tmp_path / "p.json"
    path.write_text(json.dumps(params_to_mapping(p)))
    assert load_params(path) == p


def test_unknown_and_missing_keys():
    with pytest.raises(ParameterError) as info:
        params_from_mapping({"omega_rabi": 1, "kappa": 1, "gamma_perp": 1, "pump": 0, "n_emitters": 1, "bogus": 3})
    assert set(info.value.codes) == {"UnknownKey", "MissingKey"}


def test_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ParameterError) as info:
        load_params(path)
    assert info.value.codes == ["BadDocument"]
