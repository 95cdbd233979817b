"""INI run configuration: parse, validate with aggregated errors, re-emit.

A run file has sections [mechanical], [kick], [schedule] and optionally
[ensemble], [bath], [output].  The kick is given either directly (theta) or
through the physical pulse/cavity/membrane parameters; exactly one of the two
forms must be used.  [bath] only makes sense with the physical form since the
validity report needs a cavity.  Parsing collects every problem it finds and
raises them together.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass

from .moments import MechanicalParams
from .pulses import PULSE_SHAPES


class ConfigError(ValueError):
    """Invalid run configuration; message lists every collected problem."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {e}" for e in errors))


@dataclass(frozen=True)
class PhysicalKick:
    """Pulse, cavity and membrane parameters that fix the kick strength."""

    shape: str
    pulse_duration: float
    peak_power: float
    cavity_length: float
    kappa_0: float
    wavelength: float
    mass: float
    reflectivity: float
    kappa_loss: float = 0.0

    def __post_init__(self):
        if self.shape not in PULSE_SHAPES:
            raise ValueError(f"kick shape must be one of {PULSE_SHAPES}, got {self.shape!r}")
        for name in (
            "pulse_duration",
            "peak_power",
            "cavity_length",
            "kappa_0",
            "wavelength",
            "mass",
        ):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"kick {name} must be finite and > 0, got {val}")
        if not (math.isfinite(self.kappa_loss) and self.kappa_loss >= 0):
            raise ValueError(f"kick kappa_loss must be finite and >= 0, got {self.kappa_loss}")
        if not (0.0 <= self.reflectivity < 1.0):
            raise ValueError(f"kick reflectivity must be in [0, 1), got {self.reflectivity}")


@dataclass(frozen=True)
class Schedule:
    """Kick period, run length and output sampling."""

    tau: float
    n_kicks: int
    stride: int = 100
    intra_samples: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"schedule tau must be finite and > 0, got {self.tau}")
        if self.n_kicks < 0:
            raise ValueError(f"schedule n_kicks must be >= 0, got {self.n_kicks}")
        if self.stride < 1:
            raise ValueError(f"schedule stride must be >= 1, got {self.stride}")
        if self.intra_samples != 0 and self.intra_samples < 2:
            raise ValueError(
                f"schedule intra_samples must be 0 or >= 2, got {self.intra_samples}"
            )


@dataclass(frozen=True)
class EnsembleConfig:
    """Noisy-kick averaging: per-kick theta variance and trajectory count.

    mean_theta overrides the noise mean; None uses the run's kick strength.
    """

    variance: float
    trajectories: int
    base_seed: int
    enabled: bool = True
    mean_theta: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.variance) and self.variance >= 0):
            raise ValueError(
                f"ensemble variance must be finite and >= 0, got {self.variance}"
            )
        if self.trajectories < 1:
            raise ValueError(
                f"ensemble trajectories must be >= 1, got {self.trajectories}"
            )
        if self.mean_theta is not None and not math.isfinite(self.mean_theta):
            raise ValueError(
                f"ensemble mean_theta must be finite, got {self.mean_theta}"
            )


@dataclass(frozen=True)
class BathConfig:
    """Optional overrides for the validity report's thermal bath.

    None means derive the default at run time: cutoff = 100 * kappa,
    temperature from the Bose occupancy inversion at (omega_m, n_bar).
    """

    omega_c_cutoff: float | None = None
    temperature: float | None = None

    def __post_init__(self):
        if self.omega_c_cutoff is not None and not (
            math.isfinite(self.omega_c_cutoff) and self.omega_c_cutoff > 0
        ):
            raise ValueError(
                f"bath omega_c_cutoff must be finite and > 0, got {self.omega_c_cutoff}"
            )
        if self.temperature is not None and not (
            math.isfinite(self.temperature) and self.temperature >= 0
        ):
            raise ValueError(
                f"bath temperature must be finite and >= 0, got {self.temperature}"
            )


@dataclass(frozen=True)
class RunConfig:
    """Everything one simulation run needs."""

    mechanical: MechanicalParams
    schedule: Schedule
    theta: float | None = None
    physical: PhysicalKick | None = None
    ensemble: EnsembleConfig | None = None
    bath: BathConfig | None = None
    output: str | None = None

    def __post_init__(self):
        if (self.theta is None) == (self.physical is None):
            raise ValueError(
                "exactly one of a direct kick strength (theta) and the physical "
                "pulse parameters must be given"
            )
        if self.theta is not None and not math.isfinite(self.theta):
            raise ValueError(f"kick theta must be finite, got {self.theta}")
        if self.bath is not None and self.physical is None:
            raise ValueError(
                "[bath] is only meaningful with physical kick parameters; "
                "a direct theta skips the validity report"
            )


_PHYSICAL_KEYS = (
    "shape",
    "pulse_duration",
    "peak_power",
    "cavity_length",
    "kappa_0",
    "wavelength",
    "mass",
    "reflectivity",
)

_SECTIONS = ("mechanical", "kick", "schedule", "ensemble", "bath", "output")


class _Reader:
    """Typed key extraction with error aggregation and unknown-key tracking."""

    def __init__(self, parser: configparser.ConfigParser, errors: list[str]):
        self.parser = parser
        self.errors = errors
        self.seen: dict[str, set[str]] = {s: set() for s in parser.sections()}

    def get(self, section: str, key: str, conv, required: bool = False, default=None):
        if not self.parser.has_section(section):
            if required:
                self.errors.append(f"[{section}] missing key {key!r}")
            return default
        self.seen.setdefault(section, set()).add(key)
        if not self.parser.has_option(section, key):
            if required:
                self.errors.append(f"[{section}] missing key {key!r}")
            return default
        raw = self.parser.get(section, key)
        try:
            return conv(raw)
        except (TypeError, ValueError):
            self.errors.append(
                f"[{section}] key {key!r}: cannot parse {raw!r} as {conv.__name__}"
            )
            return default

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def finish_unknown(self):
        for section in self.parser.sections():
            if section not in _SECTIONS:
                self.errors.append(f"unknown section [{section}]")
                continue
            for key in self.parser.options(section):
                if key not in self.seen.get(section, set()):
                    self.errors.append(f"[{section}] unknown key {key!r}")


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _build(errors: list[str], label: str, factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except ValueError as exc:
        errors.append(f"{label}: {exc}")
        return None


def parse_config(text: str) -> RunConfig:
    """Parse an INI run file; raises ConfigError listing every problem."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"INI syntax: {exc}"]) from exc

    errors: list[str] = []
    r = _Reader(parser, errors)

    for required_section in ("mechanical", "kick", "schedule"):
        if not parser.has_section(required_section):
            errors.append(f"missing section [{required_section}]")

    omega_m = r.get("mechanical", "omega_m", float, required=True)
    gamma_m = r.get("mechanical", "gamma_m", float, required=True)
    n_bar = r.get("mechanical", "n_bar", float, required=True)

    has_theta = r.has("kick", "theta")
    has_physical = any(r.has("kick", k) for k in _PHYSICAL_KEYS + ("kappa_loss",))
    theta = None
    physical = None
    if parser.has_section("kick"):
        if has_theta and has_physical:
            errors.append(
                "[kick] gives both theta and physical pulse keys; use exactly one form"
            )
            r.get("kick", "theta", float)
            for k in _PHYSICAL_KEYS:
                r.get("kick", k, str if k == "shape" else float)
            r.get("kick", "kappa_loss", float)
        elif has_theta:
            theta = r.get("kick", "theta", float, required=True)
        elif has_physical:
            shape = r.get("kick", "shape", str, required=True)
            pulse_duration = r.get("kick", "pulse_duration", float, required=True)
            peak_power = r.get("kick", "peak_power", float, required=True)
            cavity_length = r.get("kick", "cavity_length", float, required=True)
            kappa_0 = r.get("kick", "kappa_0", float, required=True)
            wavelength = r.get("kick", "wavelength", float, required=True)
            mass = r.get("kick", "mass", float, required=True)
            reflectivity = r.get("kick", "reflectivity", float, required=True)
            kappa_loss = r.get("kick", "kappa_loss", float, default=0.0)
            if not errors:
                physical = _build(
                    errors,
                    "[kick]",
                    PhysicalKick,
                    shape=shape,
                    pulse_duration=pulse_duration,
                    peak_power=peak_power,
                    cavity_length=cavity_length,
                    kappa_0=kappa_0,
                    wavelength=wavelength,
                    mass=mass,
                    reflectivity=reflectivity,
                    kappa_loss=kappa_loss,
                )
        else:
            errors.append(
                "[kick] needs either theta or the physical pulse keys "
                f"{_PHYSICAL_KEYS}"
            )

    tau = r.get("schedule", "tau", float, required=True)
    n_kicks = r.get("schedule", "n_kicks", int, required=True)
    stride = r.get("schedule", "stride", int, default=100)
    intra_samples = r.get("schedule", "intra_samples", int, default=0)

    ensemble = None
    if parser.has_section("ensemble"):
        variance = r.get("ensemble", "variance", float, required=True)
        trajectories = r.get("ensemble", "trajectories", int, required=True)
        base_seed = r.get("ensemble", "base_seed", int, required=True)
        enabled = r.get("ensemble", "enabled", _bool, default=True)
        mean_theta = r.get("ensemble", "mean_theta", float)
        if not errors:
            ensemble = _build(
                errors,
                "[ensemble]",
                EnsembleConfig,
                variance=variance,
                trajectories=trajectories,
                base_seed=base_seed,
                enabled=enabled,
                mean_theta=mean_theta,
            )

    bath = None
    if parser.has_section("bath"):
        cutoff = r.get("bath", "omega_c_cutoff", float)
        temperature = r.get("bath", "temperature", float)
        if not errors:
            bath = _build(
                errors, "[bath]", BathConfig, omega_c_cutoff=cutoff, temperature=temperature
            )

    output = r.get("output", "path", str)

    r.finish_unknown()
    if errors:
        raise ConfigError(errors)

    mechanical = _build(
        errors, "[mechanical]", MechanicalParams, omega_m=omega_m, gamma_m=gamma_m, n_bar=n_bar
    )
    schedule = _build(
        errors,
        "[schedule]",
        Schedule,
        tau=tau,
        n_kicks=n_kicks,
        stride=stride,
        intra_samples=intra_samples,
    )
    if errors:
        raise ConfigError(errors)

    config = _build(
        errors,
        "run",
        RunConfig,
        mechanical=mechanical,
        schedule=schedule,
        theta=theta,
        physical=physical,
        ensemble=ensemble,
        bath=bath,
        output=output,
    )
    if errors:
        raise ConfigError(errors)
    return config


def read_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_text(config: RunConfig) -> str:
    """Emit a config as INI text; parse_config(config_to_text(c)) == c."""
    parser = configparser.ConfigParser(interpolation=None)

    parser["mechanical"] = {
        "omega_m": repr(config.mechanical.omega_m),
        "gamma_m": repr(config.mechanical.gamma_m),
        "n_bar": repr(config.mechanical.n_bar),
    }
    if config.theta is not None:
        parser["kick"] = {"theta": repr(config.theta)}
    else:
        phys = config.physical
        parser["kick"] = {
            "shape": phys.shape,
            "pulse_duration": repr(phys.pulse_duration),
            "peak_power": repr(phys.peak_power),
            "cavity_length": repr(phys.cavity_length),
            "kappa_0": repr(phys.kappa_0),
            "wavelength": repr(phys.wavelength),
            "mass": repr(phys.mass),
            "reflectivity": repr(phys.reflectivity),
            "kappa_loss": repr(phys.kappa_loss),
        }
    parser["schedule"] = {
        "tau": repr(config.schedule.tau),
        "n_kicks": repr(config.schedule.n_kicks),
        "stride": repr(config.schedule.stride),
        "intra_samples": repr(config.schedule.intra_samples),
    }
    if config.ensemble is not None:
        section = {
            "variance": repr(config.ensemble.variance),
            "trajectories": repr(config.ensemble.trajectories),
            "base_seed": repr(config.ensemble.base_seed),
            "enabled": "true" if config.ensemble.enabled else "false",
        }
        if config.ensemble.mean_theta is not None:
            section["mean_theta"] = repr(config.ensemble.mean_theta)
        parser["ensemble"] = section
    if config.bath is not None:
        section = {}
        if config.bath.omega_c_cutoff is not None:
            section["omega_c_cutoff"] = repr(config.bath.omega_c_cutoff)
        if config.bath.temperature is not None:
            section["temperature"] = repr(config.bath.temperature)
        parser["bath"] = section
    if config.output is not None:
        parser["output"] = {"path": config.output}

    out = io.StringIO()
    parser.write(out)
    return out.getvalue()
