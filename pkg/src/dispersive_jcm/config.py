"""JSON run configuration for the command-line front end."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .dynamics import InitialState
from .effective import SWEEPABLE
from .errors import JCMError
from .model import ModelParams


class ConfigError(JCMError):
    """Malformed or inconsistent configuration file."""


_MODEL_FIELDS = {f.name for f in fields(ModelParams)}
_TOP_KEYS = {"model", "initial_state", "evolution", "sweep"}


@dataclass(frozen=True)
class Evolution:
    t_max: float
    points: int


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    points: int

    def grid(self):
        import numpy as np

        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    initial_state: Optional[InitialState] = None
    evolution: Optional[Evolution] = None
    sweep: Optional[Sweep] = None


def _warn_unknown(section: str, obj: dict, known) -> None:
    for key in sorted(set(obj) - set(known)):
        warnings.warn(f"unknown config key '{section}{key}' ignored", stacklevel=3)


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"{where}.{key}: missing required field")
    return obj[key]


def _number(value, where: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _complex(value, where: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_number(value[0], where + "[0]"), _number(value[1], where + "[1]"))
    raise ConfigError(f"{where}: expected [re, im], got {value!r}")


def _section(data: dict, key: str):
    obj = data.get(key)
    if obj is not None and not isinstance(obj, dict):
        raise ConfigError(f"{key}: expected an object")
    return obj


def parse_config(data) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _warn_unknown("", data, _TOP_KEYS)

    model = _section(data, "model")
    if model is None:
        raise ConfigError("model: missing required section")
    _warn_unknown("model.", model, _MODEL_FIELDS)
    kwargs = {}
    for name in ("omega_a", "omega_b", "Omega0", "g_a", "g_b"):
        kwargs[name] = _number(_require(model, name, "model"), f"model.{name}")
    for name in ("cutoff_a", "cutoff_b"):
        if name in model:
            kwargs[name] = _number(model[name], f"model.{name}", integer=True)
    if "convention" in model:
        kwargs["convention"] = model["convention"]
    try:
        params = ModelParams(**kwargs)
    except JCMError as exc:
        raise ConfigError(f"model: {exc}") from exc

    init = None
    st = _section(data, "initial_state")
    if st is not None:
        _warn_unknown("initial_state.", st, {"fock", "coherent", "atom"})
        atom = st.get("atom", "plus")
        if ("fock" in st) == ("coherent" in st):
            raise ConfigError("initial_state: give exactly one of 'fock' or 'coherent'")
        if "fock" in st:
            f = st["fock"]
            if not isinstance(f, dict):
                raise ConfigError("initial_state.fock: expected an object")
            _warn_unknown("initial_state.fock.", f, {"n_a", "n_b"})
            n_a = _number(f.get("n_a", 0), "initial_state.fock.n_a", integer=True)
            n_b = _number(f.get("n_b", 0), "initial_state.fock.n_b", integer=True)
            if n_a < 0 or n_b < 0:
                raise ConfigError("initial_state.fock: photon numbers must be non-negative")
            init = InitialState("fock", atom, n_a=n_a, n_b=n_b)
        else:
            c = st["coherent"]
            if not isinstance(c, dict):
                raise ConfigError("initial_state.coherent: expected an object")
            _warn_unknown("initial_state.coherent.", c, {"alpha", "beta"})
            init = InitialState(
                "coherent",
                atom,
                alpha=_complex(c.get("alpha", [0, 0]), "initial_state.coherent.alpha"),
                beta=_complex(c.get("beta", [0, 0]), "initial_state.coherent.beta"),
            )

    evolution = None
    ev = _section(data, "evolution")
    if ev is not None:
        _warn_unknown("evolution.", ev, {"t_max", "points"})
        t_max = _number(_require(ev, "t_max", "evolution"), "evolution.t_max")
        points = _number(_require(ev, "points", "evolution"), "evolution.points", integer=True)
        if not t_max > 0:
            raise ConfigError("evolution.t_max: must be positive")
        if points < 2:
            raise ConfigError("evolution.points: must be at least 2")
        evolution = Evolution(t_max, points)

    sweep = None
    sw = _section(data, "sweep")
    if sw is not None:
        _warn_unknown("sweep.", sw, {"parameter", "from", "to", "points"})
        parameter = _require(sw, "parameter", "sweep")
        if parameter not in SWEEPABLE:
            raise ConfigError(f"sweep.parameter: must be one of {list(SWEEPABLE)}, got {parameter!r}")
        start = _number(_require(sw, "from", "sweep"), "sweep.from")
        stop = _number(_require(sw, "to", "sweep"), "sweep.to")
        points = _number(_require(sw, "points", "sweep"), "sweep.points", integer=True)
        if points < 2 or not stop > start:
            raise ConfigError("sweep: need points >= 2 and to > from")
        sweep = Sweep(parameter, start, stop, points)

    return RunConfig(params, init, evolution, sweep)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(data)
