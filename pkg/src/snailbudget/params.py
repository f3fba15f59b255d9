"""Device, gate and separation parameters, plus the flat config file format.

All frequencies are linear (Hz) and all times are seconds. Conversion to
angular frequency happens once, when a Hamiltonian is built.

Config files are flat TOML::

    n_qubits = 4
    g3_over_2pi_hz = 60e6     # SNAIL third-order nonlinearity / 2pi
    lambda = 0.1              # SNAIL-qubit hybridization
    t1_s = 80e-6              # scalar, per-qubit list, or inf
    band_lo_hz = 4.0e9
    band_hi_hz = 5.0e9
    gate = "iswap"            # or "sqrt_iswap"
    target_fidelity = 0.99
    delta_q_hz = 180e6        # min qubit-qubit separation
    delta2_q_hz = 150e6       # optional: required conversion separation
"""

import enum
import math
from dataclasses import dataclass, field, fields

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class ConfigError(ValueError):
    """Raised for missing, malformed or out-of-range configuration values."""


class GateKind(enum.Enum):
    ISWAP = "iswap"
    SQRT_ISWAP = "sqrt_iswap"


class SpectatorModel(enum.Enum):
    ANGLE_MATCHED = "angle_matched"
    LITERAL = "literal"
    OFF = "off"


def to_angular(f):
    """Linear frequency (Hz) to angular frequency (rad/s)."""
    return 2.0 * math.pi * f


@dataclass(frozen=True)
class DeviceParams:
    g3_over_2pi: float
    lam: float
    t1_per_qubit: tuple
    n_qubits: int
    band_lo: float
    band_hi: float
    alpha_over_2pi: float | None = None
    snail_freq: float | None = None

    def __post_init__(self):
        if not (isinstance(self.n_qubits, int) and self.n_qubits >= 2):
            raise ConfigError("n_qubits must be an integer >= 2")
        if not self.g3_over_2pi > 0:
            raise ConfigError("g3_over_2pi_hz must be positive")
        if not 0 < self.lam < 1:
            raise ConfigError("lambda must lie in (0, 1)")
        if len(self.t1_per_qubit) != self.n_qubits:
            raise ConfigError(f"t1_s has {len(self.t1_per_qubit)} entries for {self.n_qubits} qubits")
        if not all(t > 0 for t in self.t1_per_qubit):
            raise ConfigError("t1_s values must be positive (use inf for no damping)")
        if not self.band_lo < self.band_hi:
            raise ConfigError("bandwidth inverted")

    @property
    def bandwidth(self):
        return (self.band_lo, self.band_hi)


@dataclass(frozen=True)
class GateSpec:
    kind: GateKind
    target_fidelity: float

    def __post_init__(self):
        if not 0 < self.target_fidelity <= 1:
            raise ConfigError("target_fidelity must lie in (0, 1]")

    @property
    def theta(self):
        return math.pi / 2 if self.kind is GateKind.ISWAP else math.pi / 4


@dataclass(frozen=True)
class SeparationConstraints:
    delta_Q: float
    delta2_Q: float | None = None
    delta_S: float | None = None
    deltaS_conv: float | None = None
    delta4_Q: float | None = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None and not v > 0:
                raise ConfigError(f"{f.name} must be positive")


@dataclass(frozen=True)
class SweepSettings:
    eta_min: float = 0.05
    eta_max: float = 4.0
    eta_points: int = 40
    delta_min_hz: float = 10e6
    delta_max_hz: float = 1e9
    delta_points: int = 40
    tol_hz: float = 1e6
    resolution_hz: float = 1e6

    def __post_init__(self):
        if not 0 < self.eta_min <= self.eta_max:
            raise ConfigError("eta range must satisfy 0 < eta_min <= eta_max")
        if not 0 < self.delta_min_hz <= self.delta_max_hz:
            raise ConfigError("delta range must satisfy 0 < delta_min_hz <= delta_max_hz")
        if self.eta_points < 1 or self.delta_points < 1:
            raise ConfigError("sweep point counts must be >= 1")
        if not (self.tol_hz > 0 and self.resolution_hz > 0):
            raise ConfigError("tolerances must be positive")


@dataclass(frozen=True)
class Config:
    device: DeviceParams
    gate: GateSpec
    separations: SeparationConstraints
    spectator_model: SpectatorModel = SpectatorModel.ANGLE_MATCHED
    sweep: SweepSettings = field(default_factory=SweepSettings)


_REQUIRED = (
    "n_qubits",
    "g3_over_2pi_hz",
    "lambda",
    "t1_s",
    "band_lo_hz",
    "band_hi_hz",
    "gate",
    "target_fidelity",
    "delta_q_hz",
)
_OPTIONAL = (
    "delta2_q_hz",
    "snail_freq_hz",
    "delta_s_hz",
    "delta_s_conv_hz",
    "delta4_q_hz",
    "alpha_over_2pi_hz",
    "spectator_model",
) + tuple(f.name for f in fields(SweepSettings))


def _number(doc, key):
    v = doc[key]
    if isinstance(v, str):
        try:
            v = float(v)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {v!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    if math.isnan(v):
        raise ConfigError(f"{key}: NaN is not allowed")
    return float(v)


def from_mapping(doc):
    """Validate a flat key/value mapping into a :class:`Config`."""
    for key in _REQUIRED:
        if key not in doc:
            raise ConfigError(f"missing required key: {key}")
    unknown = sorted(set(doc) - set(_REQUIRED) - set(_OPTIONAL))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")

    n = doc["n_qubits"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError("n_qubits must be an integer >= 2")
    t1 = doc["t1_s"]
    if isinstance(t1, list):
        t1s = tuple(_number({"t1_s": t}, "t1_s") for t in t1)
    else:
        t1s = (_number(doc, "t1_s"),) * n

    def opt(key):
        return _number(doc, key) if key in doc else None

    device = DeviceParams(
        g3_over_2pi=_number(doc, "g3_over_2pi_hz"),
        lam=_number(doc, "lambda"),
        t1_per_qubit=t1s,
        n_qubits=n,
        band_lo=_number(doc, "band_lo_hz"),
        band_hi=_number(doc, "band_hi_hz"),
        alpha_over_2pi=opt("alpha_over_2pi_hz"),
        snail_freq=opt("snail_freq_hz"),
    )
    try:
        kind = GateKind(str(doc["gate"]).lower())
    except ValueError:
        raise ConfigError(f"gate: expected 'iswap' or 'sqrt_iswap', got {doc['gate']!r}") from None
    gate = GateSpec(kind, _number(doc, "target_fidelity"))
    seps = SeparationConstraints(
        delta_Q=_number(doc, "delta_q_hz"),
        delta2_Q=opt("delta2_q_hz"),
        delta_S=opt("delta_s_hz"),
        deltaS_conv=opt("delta_s_conv_hz"),
        delta4_Q=opt("delta4_q_hz"),
    )
    if seps.delta4_Q is not None:
        raise ConfigError("delta4_q_hz: inter-module conversion separation is not implemented")
    if (seps.delta_S is not None or seps.deltaS_conv is not None) and device.snail_freq is None:
        raise ConfigError("delta_s_hz / delta_s_conv_hz require snail_freq_hz")
    try:
        model = SpectatorModel(str(doc.get("spectator_model", "angle_matched")).lower())
    except ValueError:
        raise ConfigError(f"spectator_model: unknown model {doc['spectator_model']!r}") from None
    sweep_kwargs = {}
    for f in fields(SweepSettings):
        if f.name in doc:
            v = _number(doc, f.name)
            if f.name.endswith("_points"):
                if v != int(v):
                    raise ConfigError(f"{f.name} must be an integer")
                v = int(v)
            sweep_kwargs[f.name] = v
    return Config(device, gate, seps, model, SweepSettings(**sweep_kwargs))


def parse_config(text):
    """Parse config text (flat TOML) into a validated :class:`Config`."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for key, v in doc.items():
        if isinstance(v, dict):
            raise ConfigError(f"{key}: nested tables are not supported")
    try:
        return from_mapping(doc)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(v):
    if isinstance(v, str):
        return '"' + v + '"'
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def to_mapping(config):
    d = config.device
    t1 = list(d.t1_per_qubit)
    doc = {
        "n_qubits": d.n_qubits,
        "g3_over_2pi_hz": d.g3_over_2pi,
        "lambda": d.lam,
        "t1_s": t1[0] if len(set(t1)) == 1 else t1,
        "band_lo_hz": d.band_lo,
        "band_hi_hz": d.band_hi,
        "gate": config.gate.kind.value,
        "target_fidelity": config.gate.target_fidelity,
        "delta_q_hz": config.separations.delta_Q,
        "spectator_model": config.spectator_model.value,
    }
    optional = {
        "alpha_over_2pi_hz": d.alpha_over_2pi,
        "snail_freq_hz": d.snail_freq,
        "delta2_q_hz": config.separations.delta2_Q,
        "delta_s_hz": config.separations.delta_S,
        "delta_s_conv_hz": config.separations.deltaS_conv,
    }
    doc.update({k: v for k, v in optional.items() if v is not None})
    for f in fields(SweepSettings):
        doc[f.name] = getattr(config.sweep, f.name)
    return doc


def serialize(config):
    """Render a config as flat TOML that :func:`parse_config` reads back unchanged."""
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in to_mapping(config).items())
