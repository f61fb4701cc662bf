"""Plain key = value run configuration.

One assignment per line, # starts a comment, later assignments win.
Unknown keys and out-of-range values are hard errors so a typo never
silently falls back to a default.
"""

from dataclasses import dataclass, fields

from .model import ModelParams
from .presets import PRESETS

MODELS = ("oldroyd", "hookean", "linearized")


class ConfigError(Exception):
    pass


class ParseError(ConfigError):
    def __init__(self, line, text):
        self.line = line
        super().__init__(f"line {line}: cannot parse {text.strip()!r}")


class UnknownKey(ConfigError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown key {name!r}")


class OutOfRange(ConfigError):
    def __init__(self, key, why):
        self.key = key
        super().__init__(f"{key}: {why}")


@dataclass
class RunConfig:
    n: int = 32
    mu: float = 1.0
    mu1: float = 1.0
    mu2: float = 1.0
    a: float = 0.0
    b: float = 0.0
    dt: float = 0.005
    t_end: float = 50.0
    diag_interval: int = 10
    cfl_limit: float = 0.5
    model: str = "oldroyd"
    project_tau_mean: bool = False
    preset: str = "random-band"
    amplitude: float = 0.01
    kmax: int = 4
    seed: int = 0
    out_dir: str = ""
    snapshots: bool = False
    snapshot_interval: int = 100
    fit_t_lo: float = -1.0
    fit_t_hi: float = -1.0
    report_identities: bool = False

    def params(self):
        return ModelParams(self.mu, self.mu1, self.mu2, self.a, self.b)

    def fit_window(self):
        lo = self.fit_t_lo if self.fit_t_lo >= 0 else 0.5 * self.t_end
        hi = self.fit_t_hi if self.fit_t_hi >= 0 else self.t_end
        return lo, hi


KEYS = {
    "grid.n": ("n", int),
    "params.mu": ("mu", float),
    "params.mu1": ("mu1", float),
    "params.mu2": ("mu2", float),
    "params.a": ("a", float),
    "params.b": ("b", float),
    "time.dt": ("dt", float),
    "time.t_end": ("t_end", float),
    "time.diag_interval": ("diag_interval", int),
    "time.cfl_limit": ("cfl_limit", float),
    "model": ("model", str),
    "model.project_tau_mean": ("project_tau_mean", bool),
    "init.preset": ("preset", str),
    "init.amplitude": ("amplitude", float),
    "init.kmax": ("kmax", int),
    "init.seed": ("seed", int),
    "output.dir": ("out_dir", str),
    "output.snapshots": ("snapshots", bool),
    "output.snapshot_interval": ("snapshot_interval", int),
    "fit.t_lo": ("fit_t_lo", float),
    "fit.t_hi": ("fit_t_hi", float),
    "report.identities": ("report_identities", bool),
}

_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def _cast(value, typ):
    if typ is bool:
        try:
            return _BOOL[value.lower()]
        except KeyError:
            raise ValueError(value)
    if typ is int:
        return int(value, 10)
    return typ(value)


def validate(cfg):
    if cfg.n < 8 or cfg.n % 2:
        raise OutOfRange("grid.n", f"need an even n >= 8, got {cfg.n}")
    for key in ("mu", "mu1", "mu2", "a"):
        if getattr(cfg, key) < 0:
            raise OutOfRange(f"params.{key}", "must be nonnegative")
    if not -1.0 <= cfg.b <= 1.0:
        raise OutOfRange("params.b", f"must lie in [-1, 1], got {cfg.b}")
    if cfg.dt <= 0:
        raise OutOfRange("time.dt", "must be positive")
    if cfg.t_end <= 0:
        raise OutOfRange("time.t_end", "must be positive")
    if cfg.diag_interval < 1:
        raise OutOfRange("time.diag_interval", "must be a positive step count")
    if cfg.cfl_limit <= 0:
        raise OutOfRange("time.cfl_limit", "must be positive")
    if cfg.model not in MODELS:
        raise OutOfRange("model", f"must be one of {MODELS}")
    if cfg.preset not in PRESETS:
        raise OutOfRange("init.preset", f"must be one of {PRESETS}")
    if cfg.amplitude < 0:
        raise OutOfRange("init.amplitude", "must be nonnegative")
    if cfg.kmax < 1 or 3 * cfg.kmax > cfg.n:
        raise OutOfRange("init.kmax", f"need 1 <= kmax and 3*kmax <= n, got {cfg.kmax}")
    if cfg.seed < 0:
        raise OutOfRange("init.seed", "must be nonnegative")
    if cfg.snapshot_interval < 1:
        raise OutOfRange("output.snapshot_interval", "must be a positive diag count")
    if cfg.model == "hookean" and cfg.preset == "random-band":
        raise OutOfRange("init.preset", "random-band provides no deformation field")
    if cfg.model != "hookean" and cfg.preset == "hookean-generic":
        raise OutOfRange("init.preset", "hookean-generic needs model = hookean")
    lo, hi = cfg.fit_window()
    if not 0 <= lo < hi <= cfg.t_end:
        raise OutOfRange("fit.t_lo", f"window [{lo}, {hi}] not inside [0, {cfg.t_end}]")
    return cfg


def parse(text):
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ParseError(lineno, raw)
        key, value = key.strip(), value.strip()
        if key not in KEYS:
            raise UnknownKey(key)
        attr, typ = KEYS[key]
        try:
            setattr(cfg, attr, _cast(value, typ))
        except (ValueError, TypeError):
            raise ParseError(lineno, raw) from None
    return validate(cfg)


def parse_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def render(cfg):
    """Echo the resolved configuration in parseable form."""
    by_attr = {attr: key for key, (attr, _) in KEYS.items()}
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{by_attr[f.name]} = {value}")
    return "\n".join(lines) + "\n"
