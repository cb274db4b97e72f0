"""Run configuration: INI file, environment overrides and defaults.

Precedence, lowest first: built-in defaults, the config file, environment
variables ``RICIANLP_<SECTION>_<KEY>``, command-line flags.

Recognized keys (defaults in brackets)::

    [channel]
    rician_k     Rician factor K, used when m_real/m_imag are absent [1.0]
    normalized   scale so |m|^2 + gamma_sq = 1 (with rician_k only) [true]
    m_real       real part of the line-of-sight coefficient [unset]
    m_imag       imaginary part of the line-of-sight coefficient [0.0]
    gamma_sq     diffuse variance [1.0]
    n0           noise level [1.0]

    [constraint]
    regime       fourth-moment | par | fixed-peak | average-only [fourth-moment]
    kappa        kurtosis or peak-to-average bound [2.0]
    nu           fixed peak power [1.0]

    [grid]
    snr_min, snr_max, points_per_decade [1e-4, 10, 40]

    [quadrature]
    scheme, atol, rtol, order, panel_step, max_subdivisions,
    plane_radial_nodes, plane_angular_nodes  (see QuadratureSpec)

    [optimizer]
    max_points, n_starts, tol, kt_tol, kt_grid, merge_tol, mass_floor,
    maxiter, refine_rounds, amplitude_domain  (see OptimizerConfig)

    [signal]
    scheme       ooqpsk | oobpsk | ook | ook-fixed-peak [ooqpsk]
    p            on-probability; defaults to 1/kappa [unset]
    step         first Richardson step in SNR [0.01]

    [run]
    out          output directory [.]
    seed         random seed [0]
"""
import configparser
import dataclasses
import hashlib
import json
import math
import os
import typing
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .capacity import OptimizerConfig, log_grid
from .channel import ChannelParams
from .errors import ConfigError, InvalidParameterError
from .numerics.quadrature import QuadratureSpec
from .signaling import ConstraintSet, Regime

ENV_PREFIX = "RICIANLP_"


@dataclass
class ChannelSection:
    rician_k: float = 1.0
    normalized: bool = True
    m_real: Optional[float] = None
    m_imag: float = 0.0
    gamma_sq: float = 1.0
    n0: float = 1.0


@dataclass
class ConstraintSection:
    regime: str = Regime.FOURTH_MOMENT.value
    kappa: float = 2.0
    nu: float = 1.0


@dataclass
class GridSection:
    snr_min: float = 1e-4
    snr_max: float = 10.0
    points_per_decade: int = 40


@dataclass
class QuadratureSection:
    scheme: str = "panels"
    atol: float = 1e-13
    rtol: float = 1e-10
    order: int = 16
    panel_step: float = 0.5
    max_subdivisions: int = 4000
    plane_radial_nodes: int = 80
    plane_angular_nodes: int = 96


@dataclass
class OptimizerSection:
    max_points: int = 6
    n_starts: int = 3
    tol: float = 1e-12
    kt_tol: float = 1e-4
    kt_grid: int = 400
    merge_tol: float = 1e-4
    mass_floor: float = 1e-10
    maxiter: int = 200
    refine_rounds: int = 4
    amplitude_domain: Optional[float] = None


@dataclass
class SignalSection:
    scheme: str = "ooqpsk"
    p: Optional[float] = None
    step: float = 1e-2


@dataclass
class RunSection:
    out: str = "."
    seed: int = 0


_SECTIONS = {
    "channel": ChannelSection,
    "constraint": ConstraintSection,
    "grid": GridSection,
    "quadrature": QuadratureSection,
    "optimizer": OptimizerSection,
    "signal": SignalSection,
    "run": RunSection,
}


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _convert(section, f: dataclasses.Field, text: str, where: str):
    kind = f.type
    args = typing.get_args(kind)
    optional = type(None) in args
    if optional:
        kind = next(a for a in args if a is not type(None))
    raw = text.strip()
    try:
        if optional and raw.lower() in ("", "none"):
            return None
        if kind is bool:
            return _parse_bool(raw)
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for [{section}] {f.name}: {exc}") from None


@dataclass
class RunConfig:
    """Every setting a CLI run needs; see the module docstring for keys."""

    channel: ChannelSection = field(default_factory=ChannelSection)
    constraint: ConstraintSection = field(default_factory=ConstraintSection)
    grid: GridSection = field(default_factory=GridSection)
    quadrature: QuadratureSection = field(default_factory=QuadratureSection)
    optimizer: OptimizerSection = field(default_factory=OptimizerSection)
    signal: SignalSection = field(default_factory=SignalSection)
    run: RunSection = field(default_factory=RunSection)
    # set by the CLI when ``--scheme`` asks for a fixed-scheme curve
    signal_mode: bool = False

    # --- loading ------------------------------------------------------

    def set_value(self, section: str, key: str, text: str, where: str = "<override>"):
        if section not in _SECTIONS:
            raise ConfigError(f"{where}: unknown section [{section}]")
        obj = getattr(self, section)
        fields = {f.name: f for f in dataclasses.fields(obj)}
        if key not in fields:
            raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
        setattr(obj, key, _convert(section, fields[key], text, where))

    @classmethod
    def load(cls, path: Optional[str] = None, env: Optional[Mapping[str, str]] = None) -> "RunConfig":
        """Defaults, then ``path`` (if given), then environment overrides.

        Raises
        ------
        ConfigError
            On a missing file, a syntax error, an unknown section or key,
            or a value of the wrong type. Messages carry the line number
            when the parser reports one.
        """
        cfg = cls()
        if path is not None:
            cfg._read_file(path)
        cfg.apply_env(os.environ if env is None else env)
        return cfg

    def _read_file(self, path):
        parser = configparser.ConfigParser(interpolation=None, strict=True)
        parser.optionxform = str
        lines = {}
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
            parser.read_string(text, source=path)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        section = None
        for no, line in enumerate(text.splitlines(), start=1):
            s = line.strip()
            if s.startswith("[") and s.endswith("]"):
                section = s[1:-1].strip()
            elif section and s and s[0] not in "#;" and ("=" in s or ":" in s):
                key = s.split("=", 1)[0].split(":", 1)[0].strip()
                lines[(section, key)] = no
        for section in parser.sections():
            for key, value in parser.items(section):
                where = f"{path}:{lines.get((section, key), '?')}"
                self.set_value(section, key, value, where)

    def apply_env(self, env: Mapping[str, str]):
        """Apply ``RICIANLP_<SECTION>_<KEY>`` variables; unknown names are rejected."""
        for name, value in env.items():
            if not name.startswith(ENV_PREFIX) or name == "RICIANLP_DISABLE_NUMBA":
                continue
            rest = name[len(ENV_PREFIX):].lower()
            section = next((s for s in _SECTIONS if rest.startswith(s + "_")), None)
            if section is None:
                raise ConfigError(f"environment: unknown variable {name}")
            self.set_value(section, rest[len(section) + 1:], value, where=f"environment {name}")

    # --- derived objects ----------------------------------------------

    def channel_params(self) -> ChannelParams:
        c = self.channel
        try:
            if c.m_real is not None:
                return ChannelParams(complex(c.m_real, c.m_imag), c.gamma_sq, c.n0)
            return ChannelParams.from_rician_factor(c.rician_k, c.normalized, c.gamma_sq, c.n0)
        except InvalidParameterError as exc:
            raise ConfigError(f"[channel] {exc}") from None

    def regime(self) -> Regime:
        try:
            return Regime(self.constraint.regime)
        except ValueError:
            names = ", ".join(r.value for r in Regime)
            raise ConfigError(f"[constraint] regime must be one of {names}, got {self.constraint.regime!r}") from None

    def constraint_set(self, p_av: float = 1.0) -> ConstraintSet:
        r, k = self.regime(), self.constraint
        try:
            if r is Regime.FOURTH_MOMENT:
                return ConstraintSet.fourth_moment(p_av, k.kappa)
            if r is Regime.PEAK_TO_AVERAGE:
                return ConstraintSet.peak_to_average(p_av, k.kappa)
            if r is Regime.FIXED_PEAK:
                return ConstraintSet.fixed_peak(p_av, k.nu)
            return ConstraintSet.average_only(p_av)
        except InvalidParameterError as exc:
            raise ConfigError(f"[constraint] {exc}") from None

    def quadrature_spec(self) -> QuadratureSpec:
        try:
            return QuadratureSpec(**dataclasses.asdict(self.quadrature))
        except ValueError as exc:
            raise ConfigError(f"[quadrature] {exc}") from None

    def optimizer_config(self) -> OptimizerConfig:
        try:
            return OptimizerConfig(seed=self.run.seed, spec=self.quadrature_spec(), **dataclasses.asdict(self.optimizer))
        except InvalidParameterError as exc:
            raise ConfigError(f"[optimizer] {exc}") from None

    def snr_grid(self):
        g = self.grid
        ok = (
            math.isfinite(g.snr_min) and math.isfinite(g.snr_max)
            and 0 < g.snr_min <= g.snr_max and g.points_per_decade >= 1
        )
        if not ok:
            raise ConfigError(
                f"[grid] empty or invalid SNR grid: snr_min={g.snr_min}, snr_max={g.snr_max}, "
                f"points_per_decade={g.points_per_decade}"
            )
        return log_grid(g.snr_min, g.snr_max, g.points_per_decade)

    # --- provenance ---------------------------------------------------

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form; the output directory is excluded."""
        d = self.as_dict()
        d["run"] = {k: v for k, v in d["run"].items() if k != "out"}
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()
