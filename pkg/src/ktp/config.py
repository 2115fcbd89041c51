"""Flat-JSON run configuration and the named experiment presets."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .kinetic import INIT_KINDS, InitialData, SimConfig
from .mixture import ParameterDomainError, SpeciesParams
from .moments import BOUNDARY_MODES, PhaseGrid


class ConfigError(ValueError):
    """Invalid configuration; the message names the key and its admissible range."""


REQUIRED_KEYS = ("species", "grid", "eps", "t_end", "init")
TOP_KEYS = REQUIRED_KEYS + ("cfl", "renormalize_maxwellian", "outputs")
SPECIES_KEYS = ("m", "gamma", "nu")
GRID_KEYS = ("x_lo", "x_hi", "nx", "v_lo", "v_hi", "nv", "bc")
INIT_KEYS = {
    "riemann": ("type", "left", "right", "u"),
    "sine": ("type", "base", "amplitude", "u", "u_amplitude", "wavenumber"),
}
OUTPUT_KEYS = ("every", "plots")


@dataclass(frozen=True)
class RunSpec:
    """A resolved simulation config plus output options."""

    sim: SimConfig
    plots: bool = True


def _unknown(section: str, given, allowed):
    extra = sorted(set(given) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) {extra} in {section}; allowed: {list(allowed)}")


def _num(d, key, section, lo=None, hi=None, lo_open=False, integer=False, default=None):
    if key not in d:
        if default is not None:
            return default
        raise ConfigError(f"missing key '{key}' in {section}")
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"'{section}.{key}' must be a number, got {val!r}")
    if integer and (not float(val).is_integer()):
        raise ConfigError(f"'{section}.{key}' must be an integer, got {val!r}")
    if not math.isfinite(val):
        raise ConfigError(f"'{section}.{key}' must be finite, got {val!r}")
    rng = f"{'(' if lo_open else '['}{'-inf' if lo is None else lo}, {'inf' if hi is None else hi}]"
    if lo is not None and (val < lo or (lo_open and val == lo)):
        raise ConfigError(f"'{section}.{key}' = {val} outside admissible range {rng}")
    if hi is not None and val > hi:
        raise ConfigError(f"'{section}.{key}' = {val} outside admissible range {rng}")
    return int(val) if integer else float(val)


def _pair(d, key, section, default=None):
    if key not in d:
        if default is not None:
            return default
        raise ConfigError(f"missing key '{key}' in {section}")
    val = d[key]
    if not (isinstance(val, list) and len(val) == 2):
        raise ConfigError(f"'{section}.{key}' must be a list of two numbers, got {val!r}")
    out = []
    for j, x in enumerate(val):
        out.append(_num({"v": x}, "v", f"{section}.{key}[{j}]", lo=0.0))
    return tuple(out)


def config_from_dict(raw: dict) -> RunSpec:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing required key(s) {missing}; required: {list(REQUIRED_KEYS)}")
    _unknown("config", raw, TOP_KEYS)

    sp_raw = raw["species"]
    if not (isinstance(sp_raw, list) and len(sp_raw) == 2):
        raise ConfigError("'species' must be a list of exactly two objects {m, gamma, nu}")
    species = []
    for i, s in enumerate(sp_raw):
        sec = f"species[{i}]"
        if not isinstance(s, dict):
            raise ConfigError(f"'{sec}' must be an object")
        _unknown(sec, s, SPECIES_KEYS)
        m = _num(s, "m", sec, lo=0.0, lo_open=True, default=1.0)
        gamma = _num(s, "gamma", sec, lo=1.0, hi=3.0, lo_open=True)
        nu = _num(s, "nu", sec, lo=0.0, lo_open=True, default=1.0)
        try:
            species.append(SpeciesParams(m=m, gamma=gamma, nu=nu))
        except ParameterDomainError as exc:
            raise ConfigError(f"'{sec}': {exc}") from exc

    g = raw["grid"]
    if not isinstance(g, dict):
        raise ConfigError("'grid' must be an object")
    _unknown("grid", g, GRID_KEYS)
    bc = g.get("bc", "free-flow")
    if bc not in BOUNDARY_MODES:
        raise ConfigError(f"'grid.bc' = {bc!r}; admissible: {list(BOUNDARY_MODES)}")
    x_lo, x_hi = _num(g, "x_lo", "grid"), _num(g, "x_hi", "grid")
    v_lo, v_hi = _num(g, "v_lo", "grid"), _num(g, "v_hi", "grid")
    if not x_lo < x_hi:
        raise ConfigError(f"'grid.x_lo' must be < 'grid.x_hi', got [{x_lo}, {x_hi}]")
    if not v_lo < v_hi:
        raise ConfigError(f"'grid.v_lo' must be < 'grid.v_hi', got [{v_lo}, {v_hi}]")
    grid = PhaseGrid(
        x_lo, x_hi, _num(g, "nx", "grid", lo=4, integer=True),
        v_lo, v_hi, _num(g, "nv", "grid", lo=1, integer=True), bc,
    )

    ini = raw["init"]
    if not isinstance(ini, dict):
        raise ConfigError("'init' must be an object")
    kind = ini.get("type")
    if kind not in INIT_KINDS:
        raise ConfigError(f"'init.type' = {kind!r}; admissible: {list(INIT_KINDS)}")
    _unknown("init", ini, INIT_KEYS[kind])
    if kind == "riemann":
        init = InitialData(
            kind="riemann", left=_pair(ini, "left", "init"), right=_pair(ini, "right", "init"),
            u=_num(ini, "u", "init", default=0.0),
        )
    else:
        init = InitialData(
            kind="sine", base=_pair(ini, "base", "init"), amplitude=_pair(ini, "amplitude", "init", (0.0, 0.0)),
            u=_num(ini, "u", "init", default=0.0), u_amplitude=_num(ini, "u_amplitude", "init", default=0.0),
            wavenumber=_num(ini, "wavenumber", "init", lo=1, integer=True, default=1),
        )
        if any(b - a <= 0 for b, a in zip(init.base, init.amplitude)):
            raise ConfigError("'init.base' must exceed 'init.amplitude' componentwise (positive densities)")

    outs = raw.get("outputs", {})
    if not isinstance(outs, dict):
        raise ConfigError("'outputs' must be an object")
    _unknown("outputs", outs, OUTPUT_KEYS)
    plots = outs.get("plots", True)
    if not isinstance(plots, bool):
        raise ConfigError(f"'outputs.plots' must be true or false, got {plots!r}")
    renorm = raw.get("renormalize_maxwellian", True)
    if not isinstance(renorm, bool):
        raise ConfigError(f"'renormalize_maxwellian' must be true or false, got {renorm!r}")

    sim = SimConfig(
        eps=_num(raw, "eps", "config", lo=0.0, lo_open=True),
        cfl=_num(raw, "cfl", "config", lo=0.0, hi=1.0, lo_open=True, default=0.4),
        t_end=_num(raw, "t_end", "config", lo=0.0),
        grid=grid,
        species=tuple(species),
        init=init,
        renormalize_maxwellian=renorm,
        output_every=_num(outs, "every", "outputs", lo=0, integer=True, default=0),
    )
    return RunSpec(sim=sim, plots=plots)


def config_to_dict(spec: RunSpec) -> dict:
    sim = spec.sim
    g = sim.grid
    ini = sim.init
    if ini.kind == "riemann":
        init = {"type": "riemann", "left": list(ini.left), "right": list(ini.right), "u": ini.u}
    else:
        init = {
            "type": "sine", "base": list(ini.base), "amplitude": list(ini.amplitude), "u": ini.u,
            "u_amplitude": ini.u_amplitude, "wavenumber": ini.wavenumber,
        }
    return {
        "species": [{"m": s.m, "gamma": s.gamma, "nu": s.nu} for s in sim.species],
        "grid": {"x_lo": g.x_lo, "x_hi": g.x_hi, "nx": g.nx, "v_lo": g.v_lo, "v_hi": g.v_hi, "nv": g.nv, "bc": g.bc},
        "eps": sim.eps,
        "cfl": sim.cfl,
        "t_end": sim.t_end,
        "init": init,
        "renormalize_maxwellian": sim.renormalize_maxwellian,
        "outputs": {"every": sim.output_every, "plots": spec.plots},
    }


def dump_config(spec: RunSpec) -> str:
    return json.dumps(config_to_dict(spec), indent=2, sort_keys=True) + "\n"


def load_config(path) -> RunSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc.strerror}") from exc
    if not text.strip():
        raise ConfigError(f"empty configuration file {path}; required keys: {list(REQUIRED_KEYS)}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return config_from_dict(raw)


# --- presets -----------------------------------------------------------------

RIEMANN1 = {"left": (1.0, 0.8), "right": (0.5, 0.25)}
RIEMANN2_VGRID = {
    # rho_L: (v_max, Nv for gamma1 = 2, Nv for gamma1 = 3)
    1: (3.0, 3000, 24000),
    2: (5.0, 5000, 40000),
    3: (8.0, 8000, 64000),
}
AP_EPS = (1e-2, 1e-4, 1e-6)
CASE2_GAMMA2 = {"caption": 5.0 / 3.0, "text": 7.0 / 5.0}


def _riemann(gammas, left, right, vmax, nv, eps=1e-6, nx=200) -> RunSpec:
    sim = SimConfig(
        eps=eps,
        cfl=0.4,
        t_end=0.25,
        grid=PhaseGrid(-1.0, 1.0, nx, -vmax, vmax, nv, "free-flow"),
        species=(SpeciesParams(gamma=gammas[0]), SpeciesParams(gamma=gammas[1])),
        init=InitialData(kind="riemann", left=tuple(left), right=tuple(right), u=0.0),
    )
    return RunSpec(sim=sim)


def preset_ids() -> list[str]:
    ids = ["riemann1-case1", "riemann1-case2"]
    for g in (2, 3):
        ids += [f"riemann2-case{c}-gamma{g}" for c in (1, 2, 3)]
    return ids + ["verify", "ap-sweep"]


def resolve_preset(preset: str, variant: str = "caption") -> RunSpec:
    """Resolved config of a named experiment.

    ``variant`` only affects ``riemann1-case2``: ``caption`` uses
    ``gamma2 = 5/3``, ``text`` uses ``gamma2 = 7/5``.
    """
    if variant not in CASE2_GAMMA2:
        raise ConfigError(f"variant must be one of {list(CASE2_GAMMA2)}, got {variant!r}")
    if preset in ("riemann1-case1", "ap-sweep"):
        return _riemann((2.0, 7.0 / 5.0), RIEMANN1["left"], RIEMANN1["right"], 3.0, 1000)
    if preset == "riemann1-case2":
        return _riemann((3.0, CASE2_GAMMA2[variant]), RIEMANN1["left"], RIEMANN1["right"], 3.0, 1000)
    if preset.startswith("riemann2-case"):
        try:
            case = int(preset[len("riemann2-case")])
            g1 = {"gamma2": 2.0, "gamma3": 3.0}[preset.split("-")[-1]]
        except (ValueError, KeyError):
            case, g1 = None, None
        if case in RIEMANN2_VGRID and preset == f"riemann2-case{case}-gamma{int(g1)}":
            vmax, nv2, nv3 = RIEMANN2_VGRID[case]
            return _riemann((g1, 7.0 / 5.0), (float(case), 1.0), (0.5, 0.25), vmax, nv2 if g1 == 2.0 else nv3)
    raise ConfigError(f"unknown preset {preset!r}; available: {preset_ids()}")
