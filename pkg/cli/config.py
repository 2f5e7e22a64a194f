"""
Run configuration: typed defaults, a KEY=VALUE file in dotenv syntax, and flag overrides.
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field

from dotenv import dotenv_values

from hasimoto.frames import STEP_ANGLE
from nlscoeff import ANCHOR_TIME, NLS_COUPLING
from nlscoeff.evolve import DEFAULT_TOL
from polyflow.growth import DEFAULT_BANDS, DEFAULT_WINDOW, GROWTH_TIMES, SECOND_WINDOW
from polyflow.pipeline import DEFAULT_DX
from .base import ConfigError

logger = logging.getLogger(__name__)

SUBCOMMANDS = ["selfsim", "simulate", "talbot", "riemann", "growth", "validate"]

MODES = {
    "selfsim": ["profile", "calibration"],
    "simulate": ["polygon", "corner"],
    "talbot": ["linear", "nonlinear", "carpet", "concentration", "poisson"],
    "riemann": ["trajectory", "flatness", "holder", "blocks"],
    "growth": ["both", "energy", "fourier"],
    "validate": ["fast"],
}

VALIDATION_SUITES = (
    "gauss_sum_law", "single_mode", "mass_conservation", "frame_integrity", "explicit_solutions",
    "straight_line", "linear_talbot", "concentration", "riemann_series", "intermittency",
    "energy_density", "poisson_identity",
)

DEFAULTS = {
    # general
    "mode": "",
    "seed": 0,
    "workers": 0,
    "output_dir": "",
    "plots": False,
    "nls_coupling": NLS_COUPLING,
    "tol": DEFAULT_TOL,
    "step_angle": STEP_ANGLE,
    "t0": ANCHOR_TIME,
    # selfsim
    "a": 0.5,
    "a_values": (0.2, 0.4, 0.6, 0.8, 1.0, 1.2),
    "s_factor": 1.0,
    # simulate
    "corners": (-1, 1),
    "angles": (2.0, 2.0),
    "torsions": (),
    "horizon": 0.0,
    "dx": DEFAULT_DX,
    "n": 8,
    "nu": 1.0,
    "theta": 1.0,
    "corner_horizon": 0.5,
    "corner_saved": 65,
    # talbot
    "p": 1,
    "q": 3,
    "eta": 0.45,
    "epsilon": 0.05,
    "coefficients": 24,
    "x_points": 1201,
    "lambdas": (8.0, 16.0, 32.0),
    "carpet_q": (3, 5, 7),
    "poisson_times": (0.3, 0.7, 1.3),
    # riemann
    "x0": 0.0,
    "omega0": 0.0,
    "tmax": 2.0 * math.pi,
    "n_times": 1025,
    "truncation": 10_000,
    "flatness_n": (16, 32, 64, 128, 256),
    "flatness_truncation": 2000,
    "blocks_min": 4,
    "blocks_max": 9,
    "p_values": (1.0, 2.0, 4.0, 6.0, 8.0),
    "holder_t": 0.0,
    "holder_panel": False,
    # growth
    "growth_angle": 2.0,
    "growth_times": GROWTH_TIMES,
    "window": DEFAULT_WINDOW,
    "second_window": SECOND_WINDOW,
    "bands": DEFAULT_BANDS,
    "energy_t": 0.0,
    # validate
    "suites": VALIDATION_SUITES,
}

TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


def _element_type(default):
    if default and all(isinstance(v, str) for v in default):
        return str
    if default and all(isinstance(v, int) for v in default):
        return int
    return float


def coerce(key, raw):
    """Cast a raw value (string from a file or flag, or a JSON value) to the type of the key's default."""
    if key not in DEFAULTS:
        raise ConfigError(f"Unknown configuration key '{key}'. Available keys: {sorted(DEFAULTS)}")
    if raw is None:
        raise ConfigError(f"Configuration key '{key}' has no value")
    default = DEFAULTS[key]
    try:
        if isinstance(default, bool):
            if isinstance(raw, bool):
                return raw
            word = str(raw).strip().lower()
            if word not in TRUE_WORDS | FALSE_WORDS:
                raise ValueError(f"expected one of {sorted(TRUE_WORDS | FALSE_WORDS)}")
            return word in TRUE_WORDS
        if isinstance(default, tuple):
            cast = _element_type(default)
            items = raw if isinstance(raw, (list, tuple)) else [v for v in str(raw).split(",") if v.strip()]
            return tuple(cast(v.strip() if isinstance(v, str) else v) for v in items)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return str(raw)
    except ValueError as e:
        raise ConfigError(f"Invalid value {raw!r} for '{key}' ({type(default).__name__} expected): {e}")


@dataclass
class RunConfig:
    """
    Resolved configuration of one subcommand.

    Every key of DEFAULTS is present after construction; values are reached
    as attributes (config.t0) or items (config["t0"]).
    """

    subcommand: str
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"Unknown subcommand '{self.subcommand}'. Available subcommands: {SUBCOMMANDS}")
        resolved = dict(DEFAULTS)
        for key, raw in self.values.items():
            resolved[key] = coerce(key, raw)
        if not resolved["mode"]:
            resolved["mode"] = MODES[self.subcommand][0]
        if resolved["mode"] not in MODES[self.subcommand]:
            raise ConfigError(
                f"Mode '{resolved['mode']}' is not available for '{self.subcommand}'. "
                f"Available modes: {MODES[self.subcommand]}"
            )
        unknown = set(resolved["suites"]) - set(VALIDATION_SUITES)
        if unknown:
            raise ConfigError(f"Unknown suites {sorted(unknown)}. Available suites: {list(VALIDATION_SUITES)}")
        self.values = resolved

    def __getattr__(self, key):
        values = self.__dict__.get("values", {})
        if key in values:
            return values[key]
        raise AttributeError(key)

    def __getitem__(self, key):
        return self.values[key]

    @classmethod
    def from_sources(cls, subcommand, path=None, overrides=None):
        """
        Defaults, then the file at `path`, then `overrides`; later sources win.

        A path ending in .json is read as a run manifest and its config block
        is replayed; anything else is parsed as KEY=VALUE lines.
        """
        values = {}
        if path:
            if not os.path.isfile(path):
                raise ConfigError(f"Configuration file not found: {path}")
            if path.endswith(".json"):
                with open(path, encoding="utf-8") as f:
                    block = json.load(f).get("config", {})
                block = dict(block)
                block.pop("subcommand", None)
                values.update(block)
            else:
                values.update(dotenv_values(path))
            logger.info(f"📄 Loaded configuration from {path}")
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls(subcommand, values)

    def to_dict(self):
        data = {"subcommand": self.subcommand}
        for key, value in self.values.items():
            data[key] = list(value) if isinstance(value, tuple) else value
        return data
