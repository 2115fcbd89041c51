import json

import pytest

from ktp.config import (
    AP_EPS,
    ConfigError,
    config_from_dict,
    config_to_dict,
    dump_config,
    load_config,
    preset_ids,
    resolve_preset,
)


def minimal():
    return {
        "species": [{"gamma": 2.0}, {"gamma": 1.4}],
        "grid": {"x_lo": -1, "x_hi": 1, "nx": 20, "v_lo": -3, "v_hi": 3, "nv": 100},
        "eps": 1e-3,
        "t_end": 0.05,
        "init": {"type": "riemann", "left": [1.0, 0.8], "right": [0.5, 0.25]},
    }


def test_defaults_filled():
    spec = config_from_dict(minimal())
    sim = spec.sim
    assert sim.cfl == 0.4 and sim.grid.bc == "free-flow" and sim.renormalize_maxwellian
    assert sim.species[0].m == 1.0 and sim.species[1].nu == 1.0
    assert sim.init.u == 0.0 and spec.plots


def test_round_trip():
    spec = config_from_dict(minimal())
    again = config_from_dict(json.loads(dump_config(spec)))
    assert again == spec
    assert config_to_dict(again) == config_to_dict(spec)


def test_sine_round_trip():
    raw = minimal()
    raw["init"] = {"type": "sine", "base": [1.0, 0.5], "amplitude": [0.2, 0.1], "wavenumber": 2}
    raw["grid"]["bc"] = "periodic"
    spec = config_from_dict(raw)
    assert config_from_dict(config_to_dict(spec)) == spec


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda r: r.update(colour="red"), "colour"),
        (lambda r: r["species"][0].update(gamma=3.5), "gamma"),
        (lambda r: r["species"][1].update(nu=0), "nu"),
        (lambda r: r["grid"].update(nx=2), "grid.nx"),
        (lambda r: r["grid"].update(nv=10.5), "integer"),
        (lambda r: r["grid"].update(bc="reflect"), "grid.bc"),
        (lambda r: r["grid"].update(v_lo=4), "v_lo"),
        (lambda r: r.update(eps=-1), "eps"),
        (lambda r: r.update(cfl=1.5), "cfl"),
        (lambda r: r.update(t_end="soon"), "t_end"),
        (lambda r: r["init"].update(type="vortex"), "init.type"),
        (lambda r: r["init"].update(left=[1.0]), "init.left"),
        (lambda r: r["init"].update(right=[1.0, -0.1]), "init.right"),
        (lambda r: r.update(species=[{"gamma": 2.0}]), "species"),
        (lambda r: r.pop("init"), "init"),
        (lambda r: r.update(outputs={"plots": "yes"}), "outputs.plots"),
    ],
)
def test_validation_names_key(mutate, needle):
    raw = minimal()
    mutate(raw)
    with pytest.raises(ConfigError, match=needle.replace(".", r"\.")):
        config_from_dict(raw)


def test_range_message_shows_interval():
    raw = minimal()
    raw["species"][0]["gamma"] = 0.5
    with pytest.raises(ConfigError, match=r"\(1\.0, 3\.0\]"):
        config_from_dict(raw)


def test_sine_amplitude_must_keep_density_positive():
    raw = minimal()
    raw["init"] = {"type": "sine", "base": [1.0, 0.5], "amplitude": [0.2, 0.6]}
    with pytest.raises(ConfigError, match="amplitude"):
        config_from_dict(raw)


def test_load_errors(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("  \n")
    with pytest.raises(ConfigError, match="species"):
        load_config(empty)
    bad = tmp_path / "bad.json"
    bad.write_text("{species: 1}")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(bad)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    good = tmp_path / "good.json"
    good.write_text(json.dumps(minimal()))
    assert load_config(good).sim.grid.nx == 20


def test_preset_riemann1_case1():
    sim = resolve_preset("riemann1-case1").sim
    g = sim.grid
    assert [s.gamma for s in sim.species] == [2.0, 7 / 5]
    assert sim.init.kind == "riemann" and sim.init.left == (1.0, 0.8) and sim.init.right == (0.5, 0.25)
    assert (g.x_lo, g.x_hi, g.nx, g.v_lo, g.v_hi, g.nv, g.bc) == (-1.0, 1.0, 200, -3.0, 3.0, 1000, "free-flow")
    assert (sim.cfl, sim.t_end, sim.eps) == (0.4, 0.25, 1e-6)


def test_preset_riemann1_case2_variants():
    cap = resolve_preset("riemann1-case2").sim
    txt = resolve_preset("riemann1-case2", "text").sim
    assert cap.species[0].gamma == 3.0 and cap.species[1].gamma == pytest.approx(5 / 3)
    assert txt.species[1].gamma == pytest.approx(7 / 5)
    with pytest.raises(ConfigError):
        resolve_preset("riemann1-case2", "draft")


# (rho_L, v_max, Nv at gamma1 = 2, Nv at gamma1 = 3) for the three Riemann II cases
RIEMANN2 = {1: (1.0, 3.0, 3000, 24000), 2: (2.0, 5.0, 5000, 40000), 3: (3.0, 8.0, 8000, 64000)}


@pytest.mark.parametrize("case", [1, 2, 3])
@pytest.mark.parametrize("g1", [2, 3])
def test_preset_riemann2(case, g1):
    sim = resolve_preset(f"riemann2-case{case}-gamma{g1}").sim
    rho_l, vmax, nv2, nv3 = RIEMANN2[case]
    assert sim.init.left == (rho_l, 1.0) and sim.init.right == (0.5, 0.25)
    assert (sim.grid.v_lo, sim.grid.v_hi) == (-vmax, vmax)
    assert sim.grid.nv == (nv2 if g1 == 2 else nv3)
    assert [s.gamma for s in sim.species] == [float(g1), 7 / 5]
    assert sim.eps == 1e-6 and sim.t_end == 0.25


def test_preset_ids_and_unknown():
    ids = preset_ids()
    assert "verify" in ids and "ap-sweep" in ids and len(ids) == 10
    with pytest.raises(ConfigError, match="unknown preset"):
        resolve_preset("riemann2-case4-gamma2")
    assert AP_EPS == (1e-2, 1e-4, 1e-6)
