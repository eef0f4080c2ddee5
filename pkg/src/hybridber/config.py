"""Scenario types, unit handling and the YAML scenario format.

Everything inside the library is strict SI (m, s, W, m^2/s).  The scenario
file is where mixed units live: every dimensional key carries a unit suffix
(``relay_radius_um``, ``t_total_ms``, ``tx_power_dbm`` ...) and is converted
on load.  Dumping always writes the SI suffix so a load/dump/load round trip
is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

SCHEMA_VERSION = 1

# in2on-body model per tissue depth: (P_L(d0) [dB], path-loss exponent, sigma [dB])
TISSUE_PROFILES = {
    "deep": (47.14, 4.26, 7.85),
    "near_surface": (49.81, 4.22, 6.81),
}


class ConfigError(ValueError):
    """Raised for malformed scenario files and violated invariants.

    ``field`` names the offending key (dotted path) when known.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _check(cond: bool, msg: str, name: str) -> None:
    if not cond:
        raise ConfigError(msg, name)


def _finite(value: float, name: str) -> float:
    value = float(value)
    _check(math.isfinite(value), "must be finite", name)
    return value


def _positive(value: float, name: str) -> float:
    value = _finite(value, name)
    _check(value > 0, "must be > 0", name)
    return value


@dataclass(frozen=True)
class Vector3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, _finite(getattr(self, name), name))

    @classmethod
    def of(cls, seq) -> "Vector3":
        x, y, z = seq
        return cls(x, y, z)

    def __sub__(self, other: "Vector3") -> "Vector3":
        return Vector3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __add__(self, other: "Vector3") -> "Vector3":
        return Vector3(self.x + other.x, self.y + other.y, self.z + other.z)

    def scale(self, k: float) -> "Vector3":
        return Vector3(k * self.x, k * self.y, k * self.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.z]


@dataclass(frozen=True)
class MolecularLinkConfig:
    """Relay-assisted T -> R -> D molecular link.

    The transmitter sits at the origin, the relay receiver (radius
    ``relay_radius``) is centred at ``relay_pos`` and the destination receiver
    (radius ``dest_radius``) at ``dest_pos``.  ``t_dmc`` is the whole molecular
    symbol; each hop gets half of it.
    """

    drift: Vector3
    diffusion_a: float
    diffusion_b: float
    relay_pos: Vector3
    dest_pos: Vector3
    relay_radius: float
    dest_radius: float
    molecules_a: int
    molecules_b: int
    noise_mean: float
    noise_var: float
    threshold_relay: float
    threshold_dest: float
    t_dmc: float
    prior_one: float = 0.5

    def __post_init__(self):
        _positive(self.diffusion_a, "diffusion_a")
        _positive(self.diffusion_b, "diffusion_b")
        _positive(self.relay_radius, "relay_radius")
        _positive(self.dest_radius, "dest_radius")
        _positive(self.t_dmc, "t_dmc")
        for name in ("molecules_a", "molecules_b"):
            value = getattr(self, name)
            _check(int(value) == value and value >= 0, "must be a non-negative integer", name)
            object.__setattr__(self, name, int(value))
        _check(_finite(self.noise_mean, "noise_mean") >= 0, "must be >= 0", "noise_mean")
        _check(_finite(self.noise_var, "noise_var") >= 0, "must be >= 0", "noise_var")
        # thresholds may be +-inf (always / never fire detectors)
        for name in ("threshold_relay", "threshold_dest"):
            value = float(getattr(self, name))
            _check(not math.isnan(value), "must not be NaN", name)
            object.__setattr__(self, name, value)
        _check(0.0 <= float(self.prior_one) <= 1.0, "must lie in [0, 1]", "prior_one")
        _check(self.relay_pos.norm() > self.relay_radius,
               "relay receiver must not enclose the transmitter", "relay_pos")
        _check((self.dest_pos - self.relay_pos).norm() > self.dest_radius,
               "destination receiver must not enclose the relay", "dest_pos")


@dataclass(frozen=True)
class In2onConfig:
    pl_ref_db: float
    ref_dist: float
    pathloss_exp: float
    dist: float
    tx_power: float
    noise_psd: float
    shadow_sigma_db: float
    tissue_profile: str = "deep"

    def __post_init__(self):
        _finite(self.pl_ref_db, "pl_ref_db")
        for name in ("ref_dist", "pathloss_exp", "dist", "tx_power", "noise_psd", "shadow_sigma_db"):
            _positive(getattr(self, name), name)
        _check(self.tissue_profile in TISSUE_PROFILES,
               f"must be one of {sorted(TISSUE_PROFILES)}", "tissue_profile")


@dataclass(frozen=True)
class OnBodyConfig:
    path_gain: float
    tx_power: float
    noise_psd: float
    lognorm_mu: float
    lognorm_sigma: float

    def __post_init__(self):
        for name in ("path_gain", "tx_power", "noise_psd", "lognorm_sigma"):
            _positive(getattr(self, name), name)
        _finite(self.lognorm_mu, "lognorm_mu")


@dataclass(frozen=True)
class OffBodyConfig:
    tx_power: float
    dist: float
    pathloss_exp: float
    noise_psd: float

    def __post_init__(self):
        for name in ("tx_power", "dist", "pathloss_exp", "noise_psd"):
            _positive(getattr(self, name), name)


# relative slack for t_total == t_dmc + t_ec; decimal ms values are not exact binary floats
SLOT_RTOL = 1e-12


@dataclass(frozen=True)
class SlotBudget:
    t_total: float
    t_dmc: float
    t_ec: float

    def __post_init__(self):
        _positive(self.t_total, "t_total")
        _positive(self.t_dmc, "t_dmc")
        _positive(self.t_ec, "t_ec")
        _check(abs(self.t_dmc + self.t_ec - self.t_total) <= SLOT_RTOL * self.t_total,
               f"t_dmc + t_ec = {self.t_dmc + self.t_ec!r} differs from t_total = {self.t_total!r}",
               "slot")

    @classmethod
    def split(cls, t_total: float, t_dmc: float) -> "SlotBudget":
        return cls(t_total, t_dmc, t_total - t_dmc)

    @property
    def t_em_link(self) -> float:
        """Symbol duration of each of the three EM links."""
        return self.t_ec / 3.0


@dataclass(frozen=True)
class Scenario:
    molecular: MolecularLinkConfig
    in2on: In2onConfig
    onbody: OnBodyConfig
    offbody: OffBodyConfig
    slot: SlotBudget
    name: str = ""

    def __post_init__(self):
        _check(abs(self.molecular.t_dmc - self.slot.t_dmc) <= SLOT_RTOL * self.slot.t_total,
               "molecular.t_dmc must equal slot.t_dmc", "molecular.t_dmc")

    def with_t_dmc(self, t_dmc: float) -> "Scenario":
        """Same scenario with the slot re-split at ``t_dmc``."""
        slot = SlotBudget.split(self.slot.t_total, t_dmc)
        return replace(self, molecular=replace(self.molecular, t_dmc=t_dmc), slot=slot)


# --------------------------------------------------------------------------
# file format

# suffix -> divisor to SI; dividing by an exact power of ten keeps e.g. 100 um == 1e-4 m
_LENGTH = {"m": 1, "mm": 10 ** 3, "um": 10 ** 6}
_TIME = {"s": 1, "ms": 10 ** 3, "us": 10 ** 6}
_SPEED = {"m_per_s": 1, "um_per_s": 10 ** 6}
_DIFFUSION = {"m2_per_s": 1, "um2_per_s": 10 ** 12}


def _pop_unit(section: dict, base: str, units: Mapping[str, float], where: str, default=None):
    """Pop ``base_<unit>`` from ``section`` and convert to SI."""
    found = [(u, f) for u, f in units.items() if f"{base}_{u}" in section]
    if len(found) > 1:
        keys = ", ".join(f"{base}_{u}" for u, _ in found)
        raise ConfigError(f"give exactly one of {keys}", f"{where}.{base}")
    if not found:
        if default is None:
            opts = " | ".join(f"{base}_{u}" for u in units)
            raise ConfigError(f"missing (expected one of {opts})", f"{where}.{base}")
        return default
    unit, factor = found[0]
    raw = section.pop(f"{base}_{unit}")
    name = f"{where}.{base}_{unit}"
    if isinstance(raw, (list, tuple)):
        if len(raw) != 3:
            raise ConfigError("expected a 3-vector", name)
        return Vector3(*(_number(v, name) / factor for v in raw))
    return _number(raw, name) / factor


def _number(raw: Any, name: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"expected a number, got {raw!r}", name)
    return float(raw)


def _pop_power(section: dict, base: str, where: str) -> float:
    if f"{base}_w" in section and f"{base}_dbm" in section:
        raise ConfigError(f"give one of {base}_w, {base}_dbm", f"{where}.{base}")
    if f"{base}_dbm" in section:
        return dbm_to_watt(_number(section.pop(f"{base}_dbm"), f"{where}.{base}_dbm"))
    if f"{base}_w" in section:
        return _number(section.pop(f"{base}_w"), f"{where}.{base}_w")
    raise ConfigError(f"missing (expected {base}_w or {base}_dbm)", f"{where}.{base}")


def _pop_psd(section: dict, where: str) -> float:
    if "noise_psd_dbm_per_hz" in section and "noise_psd_w_per_hz" in section:
        raise ConfigError("give one of noise_psd_w_per_hz, noise_psd_dbm_per_hz", f"{where}.noise_psd")
    if "noise_psd_dbm_per_hz" in section:
        return dbm_to_watt(_number(section.pop("noise_psd_dbm_per_hz"), f"{where}.noise_psd_dbm_per_hz"))
    if "noise_psd_w_per_hz" in section:
        return _number(section.pop("noise_psd_w_per_hz"), f"{where}.noise_psd_w_per_hz")
    raise ConfigError("missing (expected noise_psd_w_per_hz or noise_psd_dbm_per_hz)", f"{where}.noise_psd")


def _pop_plain(section: dict, key: str, where: str, default=None):
    if key not in section:
        if default is None:
            raise ConfigError("missing", f"{where}.{key}")
        return default
    raw = section.pop(key)
    if isinstance(raw, str) and raw.strip().lower() in ("inf", "+inf", "-inf"):
        return float(raw)
    return _number(raw, f"{where}.{key}")


def _no_leftovers(section: dict, where: str) -> None:
    if section:
        raise ConfigError(f"unknown keys {sorted(section)}", where)


def _section(doc: dict, key: str) -> dict:
    sec = doc.pop(key, None)
    if not isinstance(sec, dict):
        raise ConfigError("missing or not a mapping", key)
    return dict(sec)


def _wrap(fn, where: str, *args, **kwargs):
    """Construct a dataclass, prefixing invariant errors with the section name."""
    try:
        return fn(*args, **kwargs)
    except ConfigError as exc:
        if exc.field and not exc.field.startswith(where + ".") and exc.field != where:
            raise ConfigError(str(exc).split(": ", 1)[-1], f"{where}.{exc.field}") from None
        raise


def scenario_from_dict(doc: Mapping[str, Any]) -> Scenario:
    """Build a validated :class:`Scenario` from a parsed scenario document."""
    if not isinstance(doc, Mapping):
        raise ConfigError("top level must be a mapping")
    doc = dict(doc)
    version = doc.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})",
                          "schema_version")
    name = str(doc.pop("name", ""))

    slot_sec = _section(doc, "slot")
    t_total = _pop_unit(slot_sec, "t_total", _TIME, "slot")
    t_dmc = _pop_unit(slot_sec, "t_dmc", _TIME, "slot")
    t_ec = _pop_unit(slot_sec, "t_ec", _TIME, "slot", default=t_total - t_dmc)
    _no_leftovers(slot_sec, "slot")
    slot = _wrap(SlotBudget, "slot", t_total, t_dmc, t_ec)

    m = _section(doc, "molecular")
    diffusion = _pop_unit(m, "diffusion", _DIFFUSION, "molecular", default=False)
    if diffusion is not False:
        if any(k.startswith("diffusion_a_") or k.startswith("diffusion_b_") for k in m):
            raise ConfigError("give either diffusion or diffusion_a/diffusion_b", "molecular.diffusion")
        diffusion_a = diffusion_b = diffusion
    else:
        diffusion_a = _pop_unit(m, "diffusion_a", _DIFFUSION, "molecular")
        diffusion_b = _pop_unit(m, "diffusion_b", _DIFFUSION, "molecular")
    molecules = m.pop("molecules", None)
    q_a = m.pop("molecules_a", molecules)
    q_b = m.pop("molecules_b", molecules)
    for key, q in (("molecules_a", q_a), ("molecules_b", q_b)):
        if q is None:
            raise ConfigError("missing (or give molecules)", f"molecular.{key}")
        if isinstance(q, bool) or not isinstance(q, (int, float)):
            raise ConfigError(f"expected an integer, got {q!r}", f"molecular.{key}")
    mol = _wrap(
        MolecularLinkConfig, "molecular",
        drift=_pop_unit(m, "drift", _SPEED, "molecular"),
        diffusion_a=diffusion_a,
        diffusion_b=diffusion_b,
        relay_pos=_pop_unit(m, "relay_pos", _LENGTH, "molecular"),
        dest_pos=_pop_unit(m, "dest_pos", _LENGTH, "molecular"),
        relay_radius=_pop_unit(m, "relay_radius", _LENGTH, "molecular"),
        dest_radius=_pop_unit(m, "dest_radius", _LENGTH, "molecular"),
        molecules_a=q_a,
        molecules_b=q_b,
        noise_mean=_pop_plain(m, "noise_mean", "molecular"),
        noise_var=_pop_plain(m, "noise_var", "molecular"),
        threshold_relay=_pop_plain(m, "threshold_relay", "molecular"),
        threshold_dest=_pop_plain(m, "threshold_dest", "molecular"),
        t_dmc=slot.t_dmc,
        prior_one=_pop_plain(m, "prior_one", "molecular", default=0.5),
    )
    _no_leftovers(m, "molecular")

    s = _section(doc, "in2on")
    profile = s.pop("tissue_profile", "deep")
    if profile not in TISSUE_PROFILES:
        raise ConfigError(f"must be one of {sorted(TISSUE_PROFILES)}", "in2on.tissue_profile")
    pl0, n_exp, sigma = TISSUE_PROFILES[profile]
    in2on = _wrap(
        In2onConfig, "in2on",
        pl_ref_db=_pop_plain(s, "pl_ref_db", "in2on", default=pl0),
        ref_dist=_pop_unit(s, "ref_dist", _LENGTH, "in2on"),
        pathloss_exp=_pop_plain(s, "pathloss_exp", "in2on", default=n_exp),
        dist=_pop_unit(s, "dist", _LENGTH, "in2on"),
        tx_power=_pop_power(s, "tx_power", "in2on"),
        noise_psd=_pop_psd(s, "in2on"),
        shadow_sigma_db=_pop_plain(s, "shadow_sigma_db", "in2on", default=sigma),
        tissue_profile=profile,
    )
    _no_leftovers(s, "in2on")

    s = _section(doc, "onbody")
    if "path_loss_db" in s and "path_gain" in s:
        raise ConfigError("give one of path_loss_db, path_gain", "onbody.path_gain")
    if "path_loss_db" in s:
        gain = db_to_linear(-_number(s.pop("path_loss_db"), "onbody.path_loss_db"))
    else:
        gain = _pop_plain(s, "path_gain", "onbody")
    onbody = _wrap(
        OnBodyConfig, "onbody",
        path_gain=gain,
        tx_power=_pop_power(s, "tx_power", "onbody"),
        noise_psd=_pop_psd(s, "onbody"),
        lognorm_mu=_pop_plain(s, "lognorm_mu", "onbody"),
        lognorm_sigma=_pop_plain(s, "lognorm_sigma", "onbody"),
    )
    _no_leftovers(s, "onbody")

    s = _section(doc, "offbody")
    offbody = _wrap(
        OffBodyConfig, "offbody",
        tx_power=_pop_power(s, "tx_power", "offbody"),
        dist=_pop_unit(s, "dist", _LENGTH, "offbody"),
        pathloss_exp=_pop_plain(s, "pathloss_exp", "offbody"),
        noise_psd=_pop_psd(s, "offbody"),
    )
    _no_leftovers(s, "offbody")

    _no_leftovers(doc, "<top level>")
    return Scenario(mol, in2on, onbody, offbody, slot, name=name)


def scenario_to_dict(sc: Scenario) -> dict:
    """Serialise with SI unit suffixes (exact round trip through :func:`scenario_from_dict`)."""
    m = sc.molecular
    return {
        "schema_version": SCHEMA_VERSION,
        "name": sc.name,
        "slot": {"t_total_s": sc.slot.t_total, "t_dmc_s": sc.slot.t_dmc, "t_ec_s": sc.slot.t_ec},
        "molecular": {
            "drift_m_per_s": m.drift.as_list(),
            "diffusion_a_m2_per_s": m.diffusion_a,
            "diffusion_b_m2_per_s": m.diffusion_b,
            "relay_pos_m": m.relay_pos.as_list(),
            "dest_pos_m": m.dest_pos.as_list(),
            "relay_radius_m": m.relay_radius,
            "dest_radius_m": m.dest_radius,
            "molecules_a": m.molecules_a,
            "molecules_b": m.molecules_b,
            "noise_mean": float(m.noise_mean),
            "noise_var": float(m.noise_var),
            "threshold_relay": _inf_safe(m.threshold_relay),
            "threshold_dest": _inf_safe(m.threshold_dest),
            "prior_one": float(m.prior_one),
        },
        "in2on": {
            "tissue_profile": sc.in2on.tissue_profile,
            "pl_ref_db": sc.in2on.pl_ref_db,
            "ref_dist_m": sc.in2on.ref_dist,
            "pathloss_exp": sc.in2on.pathloss_exp,
            "dist_m": sc.in2on.dist,
            "tx_power_w": sc.in2on.tx_power,
            "noise_psd_w_per_hz": sc.in2on.noise_psd,
            "shadow_sigma_db": sc.in2on.shadow_sigma_db,
        },
        "onbody": {
            "path_gain": sc.onbody.path_gain,
            "tx_power_w": sc.onbody.tx_power,
            "noise_psd_w_per_hz": sc.onbody.noise_psd,
            "lognorm_mu": sc.onbody.lognorm_mu,
            "lognorm_sigma": sc.onbody.lognorm_sigma,
        },
        "offbody": {
            "tx_power_w": sc.offbody.tx_power,
            "dist_m": sc.offbody.dist,
            "pathloss_exp": sc.offbody.pathloss_exp,
            "noise_psd_w_per_hz": sc.offbody.noise_psd,
        },
    }


def _inf_safe(value: float):
    return str(value) if math.isinf(value) else float(value)


def parse_scenario(text: str) -> Scenario:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse scenario: {exc}") from exc
    return scenario_from_dict(doc)


def load_scenario(path) -> Scenario:
    """Load and validate a scenario file, or a bundled preset by name.

    ``path`` may be a filesystem path or the name of a shipped preset
    (``"default"``, ``"fig8_wx10"`` ...; see :func:`preset_names`).
    """
    p = Path(path)
    if not p.exists() and str(path) in preset_names():
        return parse_scenario(_preset_text(str(path)))
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text)


def dump_scenario(sc: Scenario, path=None) -> str:
    text = yaml.safe_dump(scenario_to_dict(sc), sort_keys=False)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def preset_names() -> list[str]:
    root = resources.files("hybridber") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def _preset_text(name: str) -> str:
    return (resources.files("hybridber") / "presets" / f"{name}.yaml").read_text(encoding="utf-8")


def load_preset(name: str) -> Scenario:
    return parse_scenario(_preset_text(name))


def with_overrides(sc: Scenario, overrides: Mapping[str, Any]) -> Scenario:
    """Apply ``section.key=value`` overrides in file-format units and revalidate.

    Keys use the file schema, e.g. ``{"molecular.relay_pos_um": [100, 54, 10]}``
    or ``{"slot.t_dmc_ms": 4.2}``.  A key whose base name already exists with a
    different unit replaces it.
    """
    doc = scenario_to_dict(sc)
    for dotted, value in overrides.items():
        section, _, key = dotted.partition(".")
        if not key:
            raise ConfigError("override keys must look like section.key", dotted)
        if section not in doc or not isinstance(doc[section], dict):
            raise ConfigError("unknown section", dotted)
        sec = doc[section]
        base = _base_name(key)
        for existing in list(sec):
            if _base_name(existing) == base and existing != key:
                del sec[existing]
        if section == "slot" and base == "t_dmc":
            sec.pop("t_ec_s", None)
        if section == "slot" and base == "t_total":
            sec.pop("t_ec_s", None)
        if section == "molecular" and base == "molecules":
            sec.pop("molecules_a", None)
            sec.pop("molecules_b", None)
        if section == "onbody" and key == "path_loss_db":
            sec.pop("path_gain", None)
        if section == "molecular" and base == "diffusion":
            sec.pop("diffusion_a_m2_per_s", None)
            sec.pop("diffusion_b_m2_per_s", None)
        sec[key] = value
    return scenario_from_dict(doc)


_SUFFIXES = sorted(
    {f"_{u}" for u in (*_LENGTH, *_TIME, *_SPEED, *_DIFFUSION)} | {"_w", "_dbm", "_w_per_hz", "_dbm_per_hz"},
    key=len, reverse=True,
)


def _base_name(key: str) -> str:
    for suffix in _SUFFIXES:
        if key.endswith(suffix):
            return key[: -len(suffix)]
    return key
