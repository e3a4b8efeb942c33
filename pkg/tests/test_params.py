import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrpnoise.params import (
    CavityParams,
    ConflictError,
    LossBudget,
    ParseError,
    SqueezerParams,
    SweepSpec,
    ValidationError,
    config_from_dict,
    dump_config,
    intensity_from_theta,
    load_config,
    parse_config,
    preset_fig2,
    preset_fig3,
    theta_from_intensity,
)

BASE = "r = 1.7\nL_a_m = 4000\nkappa_a_hz = 500\ntheta_a_s3 = 2.5e8\nm_kg = 40\n"


def write(tmp_path, text):
    p = tmp_path / "c.cfg"
    p.write_text(text, encoding="utf-8")
    return p


def test_kappa_hz_converted_to_rad_per_s(tmp_path):
    cfg = load_config(write(tmp_path, BASE))
    assert cfg.cavity_a.kappa == 2 * math.pi * 500


def test_efficiency_out_of_range_names_field(tmp_path):
    with pytest.raises(ValidationError) as err:
        load_config(write(tmp_path, BASE + "eta_inp_a = 1.2\n"))
    assert err.value.field == "eta_inp_a"
    assert "eta_inp_a" in str(err.value)


@pytest.mark.parametrize("name", ["fig2", "fig3"])
def test_shipped_preset_files_match_presets(config_dir, name):
    preset = {"fig2": preset_fig2, "fig3": preset_fig3}[name]()
    assert load_config(config_dir / f"{name}.cfg") == preset


def test_fig2_preset_values():
    cfg = preset_fig2()
    assert cfg.squeezer.r == 1.7
    assert cfg.losses.eta_int_a == 0.9999
    assert cfg.losses.eta_inp_b == cfg.losses.eta_out_a == 0.975
    assert cfg.mech.omega_m == 0
    assert cfg.mech.mass_m == 40.0
    assert cfg.cavity_a.length_L == cfg.cavity_b.length_L == 4000.0
    assert cfg.cavity_a.theta == (2 * math.pi * 100) ** 3
    assert cfg.sweep == SweepSpec(1.0, 1000.0, 2000, "log")


def test_fig3_preset_only_changes_suspension():
    f2, f3 = preset_fig2(), preset_fig3()
    assert f3.mech.omega_m / (2 * math.pi) == pytest.approx(0.25, rel=1e-15)
    assert f3.mech.eta_over_m / (2 * math.pi) == pytest.approx(0.05, rel=1e-15)
    assert replace(f3, mech=f2.mech) == f2


@pytest.mark.parametrize("text, exc", [
    ("r 1.7\n", ParseError),
    ("bogus = 1\n", ParseError),
    ("r = abc\n", ParseError),
    ("r = 1\nr = 2\n", ParseError),
    ("r =\n", ParseError),
    ("L_a_m = 1\nkappa_a_hz = 1\nm_kg = 1\ntheta_a_s3 = 1\n", ValidationError),
])
def test_malformed_files(tmp_path, text, exc):
    with pytest.raises(exc):
        load_config(write(tmp_path, text))


def test_comments_and_blank_lines_ignored():
    values = parse_config("# header\n\n r = 0.5   # squeeze\n")
    assert values == {"r": 0.5}


@pytest.mark.parametrize("line, key", [
    ("L_a_m = -1", "L_a_m"),
    ("kappa_b_hz = 0", "kappa_b_hz"),
    ("m_kg = 0", "m_kg"),
    ("omega_m_hz = -0.1", "omega_m_hz"),
    ("phi_L = 3.5", "phi_L"),
    ("n_points = 1", "n_points"),
    ("spacing = cubic", "spacing"),
    ("f_max_hz = 0.5", "f_max_hz"),
])
def test_invariant_violations_name_the_key(tmp_path, line, key):
    text = "\n".join(l for l in BASE.splitlines() if not l.startswith(line.split()[0] + " ")) + "\n" + line + "\n"
    with pytest.raises(ValidationError) as err:
        load_config(write(tmp_path, text))
    assert err.value.field == key


def test_theta_from_pump_intensity(tmp_path):
    text = BASE.replace("theta_a_s3 = 2.5e8\n", "") + "I_a_w = 8.4e5\nomega_L_hz = 2.818e14\n"
    cfg = load_config(write(tmp_path, text))
    expected = theta_from_intensity(8.4e5, 2 * math.pi * 2.818e14, 40.0, 4000.0)
    assert cfg.cavity_a.theta == expected


def test_theta_intensity_conflict(tmp_path):
    with pytest.raises(ConflictError):
        load_config(write(tmp_path, BASE + "I_a_w = 8.4e5\nomega_L_hz = 2.818e14\n"))


def test_intensity_without_laser_frequency(tmp_path):
    with pytest.raises(ValidationError):
        load_config(write(tmp_path, BASE.replace("theta_a_s3 = 2.5e8\n", "") + "I_a_w = 1e5\n"))


def test_consistent_theta_and_intensity_accepted():
    theta = theta_from_intensity(8.4e5, 2 * math.pi * 2.818e14, 40.0, 4000.0)
    cav = CavityParams(4000.0, 500.0, theta * (1 + 1e-12), 8.4e5, 2.818e14).resolved(40.0)
    assert cav.theta == theta * (1 + 1e-12)


@settings(max_examples=200)
@given(
    st.floats(1e-3, 1e9), st.floats(1e12, 1e16), st.floats(1e-3, 1e3), st.floats(1.0, 1e5),
)
def test_theta_intensity_roundtrip(intensity, omega_l, mass, length):
    theta = theta_from_intensity(intensity, omega_l, mass, length)
    back = intensity_from_theta(theta, omega_l, mass, length)
    assert back == pytest.approx(intensity, rel=1e-12)


def test_squeezer_rejects_other_phase():
    with pytest.raises(ValidationError):
        SqueezerParams(1.0, phase=0.3)
    with pytest.raises(ValidationError):
        SqueezerParams(-0.1)


def test_loss_budget_lossless_flag():
    assert LossBudget().is_lossless
    assert not preset_fig2().losses.is_lossless


effs = st.floats(0.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(
    r=st.floats(0, 3), phi=st.floats(0.01, 3.13), la=st.floats(1, 1e4), lb=st.floats(1, 1e4),
    ka=st.floats(1, 1e4), kb=st.floats(1, 1e4), ta=st.floats(1, 1e12), tb=st.floats(1, 1e12),
    m=st.floats(0.1, 1e3), wm=st.floats(0, 10), g=st.floats(0, 10),
    e=st.tuples(effs, effs, effs, effs, effs, effs),
    fmin=st.floats(0.01, 10), n=st.integers(2, 5000), spacing=st.sampled_from(["log", "linear"]),
    th=st.floats(0, 10), pth=st.floats(0, 10),
)
def test_dump_load_roundtrip_is_exact(tmp_path_factory, r, phi, la, lb, ka, kb, ta, tb, m, wm, g, e, fmin, n,
                                      spacing, th, pth):
    values = dict(r=r, phi_L=phi, L_a_m=la, L_b_m=lb, kappa_a_hz=ka, kappa_b_hz=kb, theta_a_s3=ta,
                  theta_b_s3=tb, m_kg=m, omega_m_hz=wm, eta_over_m_hz=g, f_min_hz=fmin, f_max_hz=fmin * 100,
                  n_points=n, spacing=spacing, thermal_ratio=th, pivot_thermal_ratio=pth)
    values.update(zip(["eta_inp_a", "eta_inp_b", "eta_out_a", "eta_out_b", "eta_int_a", "eta_int_b"], e))
    cfg = config_from_dict(values)
    p = tmp_path_factory.mktemp("rt") / "c.cfg"
    p.write_text(dump_config(cfg), encoding="utf-8")
    assert load_config(p) == cfg
