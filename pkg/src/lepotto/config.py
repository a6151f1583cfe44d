"""JSON run configuration.

User-facing fields are in the units the experiment quotes: drives and
detunings as X/2pi in kHz, decay rates in kHz, durations in microseconds.
They are converted once, by the ``*_params``/``cycle_spec`` helpers.
"""
import json
from typing import List, Literal, Optional

import pydantic
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import ParseError, ValidationError
from .liouvillian import QubitParams, ThreeLevelParams
from .otto import ROLES, OttoCycleSpec, StrokeParams, default_t2_grid, preset
from .units import US, khz_to_rad, rate_khz

COMMANDS = ("spectrum", "steady", "cycle", "sweep-t2", "sweep-ratio", "lep-locate", "three-level-compare")
Command = Literal["spectrum", "steady", "cycle", "sweep-t2", "sweep-ratio", "lep-locate", "three-level-compare"]
PresetName = Literal["exact-exact", "broken-broken", "exact-broken"]


class StrokeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega_khz: float = Field(ge=0)
    gamma_khz: float = Field(ge=0)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Command
    # single-qubit commands
    delta_khz: float = 0.0
    omega_khz: Optional[float] = Field(default=None, ge=0)
    gamma_khz: Optional[float] = Field(default=None, ge=0)
    # cycle commands
    preset: PresetName = "exact-broken"
    ramp: Literal["staircase", "linear"] = "staircase"
    strokes: Optional[List[StrokeConfig]] = Field(default=None, min_length=4, max_length=4)
    delta_min_khz: Optional[float] = Field(default=None, ge=0)
    delta_max_khz: Optional[float] = Field(default=None, gt=0)
    t1_us: Optional[float] = Field(default=None, gt=0)
    t2_us: Optional[float] = Field(default=None, gt=0)
    t3_us: Optional[float] = Field(default=None, gt=0)
    t4_us: Optional[float] = Field(default=None, gt=0)
    sample_dt_us: float = Field(default=0.02, gt=0)
    n_cycles: int = Field(default=1, ge=1)
    t2_values_us: Optional[List[float]] = Field(default=None, min_length=1)
    ratio_values: Optional[List[float]] = Field(default=None, min_length=1)
    # spectrum scans
    source: Literal["two-level", "three-level"] = "two-level"
    ratio_lo: float = Field(default=0.05, gt=0)
    ratio_hi: float = Field(default=1.0, gt=0)
    lep_rtol: float = Field(default=1e-4, gt=0)
    scan_points: int = Field(default=41, ge=2)
    omega_p_over_gamma: float = Field(default=0.1, gt=0)
    gamma_g_khz: float = Field(default=10000.0, gt=0)
    gamma_e_khz: float = Field(default=0.0, ge=0)
    # execution and output
    shots: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    out_dir: str = "."

    @model_validator(mode="after")
    def _check(self):
        if self.command in ("spectrum", "steady"):
            for name in ("omega_khz", "gamma_khz"):
                if getattr(self, name) is None:
                    raise ValueError(f"{name} is required for '{self.command}'")
        if self.ratio_lo >= self.ratio_hi:
            raise ValueError("ratio_lo must be below ratio_hi")
        for name in ("t2_values_us", "ratio_values"):
            vals = getattr(self, name)
            if vals is not None and any(v <= 0 for v in vals):
                raise ValueError(f"{name} entries must be positive")
        return self

    # -- conversions to internal units ---------------------------------

    def qubit_params(self) -> QubitParams:
        return QubitParams(khz_to_rad(self.delta_khz), khz_to_rad(self.omega_khz), rate_khz(self.gamma_khz))

    def three_level_params(self) -> ThreeLevelParams:
        gamma = rate_khz(self.gamma_g_khz + self.gamma_e_khz)
        return ThreeLevelParams(
            delta=0.0,
            omega=0.0,
            omega_p=self.omega_p_over_gamma * gamma,
            gamma_g=rate_khz(self.gamma_g_khz),
            gamma_e=rate_khz(self.gamma_e_khz),
        )

    def cycle_spec(self) -> OttoCycleSpec:
        base = preset(self.preset)
        changes = {"ramp_mode": self.ramp, "sample_dt": self.sample_dt_us * US}
        if self.strokes is not None:
            changes["strokes"] = tuple(
                StrokeParams(khz_to_rad(s.omega_khz), rate_khz(s.gamma_khz), role) for s, role in zip(self.strokes, ROLES)
            )
        if self.delta_min_khz is not None:
            changes["delta_min"] = khz_to_rad(self.delta_min_khz)
        if self.delta_max_khz is not None:
            changes["delta_max"] = khz_to_rad(self.delta_max_khz)
        for name in ("t1", "t2", "t3", "t4"):
            val = getattr(self, f"{name}_us")
            if val is not None:
                changes[name] = val * US
        if ("delta_min" in changes or "delta_max" in changes) and self.t1_us is None:
            changes["t1"] = None
        if ("delta_min" in changes or "delta_max" in changes) and self.t3_us is None:
            changes["t3"] = None
        try:
            return OttoCycleSpec(**{**base.__dict__, **changes})
        except ValueError as exc:
            raise ValidationError("cycle", str(exc)) from exc

    def t2_values(self):
        if self.t2_values_us is None:
            return default_t2_grid()
        return [v * US for v in self.t2_values_us]

    def ratios(self):
        if self.ratio_values is None:
            return [0.05 * k for k in range(1, 21)]
        return list(self.ratio_values)

    def to_json(self):
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def _validation_error(exc: pydantic.ValidationError):
    err = exc.errors()[0]
    field = ".".join(str(x) for x in err["loc"]) or "config"
    msg = err["msg"]
    if msg.startswith("Value error, "):
        msg = msg[len("Value error, "):]
    return ValidationError(field, msg)


def validate_config(data) -> RunConfig:
    if not isinstance(data, dict):
        raise ValidationError("config", "top level must be a JSON object")
    try:
        return RunConfig.model_validate(data)
    except pydantic.ValidationError as exc:
        raise _validation_error(exc) from None


def load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def parse_config(text) -> RunConfig:
    return validate_config(load_json(text))
