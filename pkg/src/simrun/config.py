"""Scenario configuration: parsing, validation, and defaults.

An empty scenario ({}) reproduces the reference setup: 512 kbps up,
6 Mbps down, 80 ms one-way delay, 200-packet access buffers, a questing
client/server pair plus a bulk upload, 1000 s run with the last 200 s
measured. Unknown keys anywhere are errors, never ignored.
"""

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import List, Optional, Tuple

from .errors import ConfigError

TCP_VARIANTS = ("sack", "new_reno", "vegas")
FLOW_ROLES = ("wow", "ftp")

TRAFFIC_FORMAT = "traffic-params-v1"


def _require_int(raw: dict, key: str, default: int, minimum: int) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: must be an integer")
    if value < minimum:
        raise ConfigError(f"{key}: must be at least {minimum}, got {value}")
    return value


def _require_num(raw: dict, key: str, default: float, *,
                 minimum: float = 0.0, exclusive: bool = True) -> float:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: must be a number")
    value = float(value)
    if exclusive and value <= minimum:
        raise ConfigError(f"{key}: must be greater than {minimum}, got {value}")
    if not exclusive and value < minimum:
        raise ConfigError(f"{key}: must be at least {minimum}, got {value}")
    return value


@dataclass
class FlowConfig:
    role: str
    tcp_variant: str = "sack"
    adv_window_segments: int = 64
    start_s: float = 0.0

    def to_dict(self) -> dict:
        return {"role": self.role, "tcp_variant": self.tcp_variant,
                "adv_window_segments": self.adv_window_segments,
                "start_s": self.start_s}


@dataclass
class ScenarioConfig:
    uplink_rate_bps: int = 512_000
    downlink_rate_bps: int = 6_000_000
    lan_rate_bps: int = 100_000_000
    one_way_delay_s: float = 0.080
    lan_delay_s: float = 0.0001
    access_delay_s: float = 0.001
    uplink_buffer_pkts: int = 200
    downlink_buffer_pkts: int = 200
    duration_s: float = 1000.0
    measurement_window: Tuple[float, float] = (800.0, 1000.0)
    seed: int = 0
    flows: List[FlowConfig] = field(default_factory=lambda: [
        FlowConfig(role="wow"), FlowConfig(role="ftp")])
    traffic_params_path: Optional[str] = None
    packet_log: bool = False

    def to_dict(self) -> dict:
        return {
            "uplink_rate_bps": self.uplink_rate_bps,
            "downlink_rate_bps": self.downlink_rate_bps,
            "lan_rate_bps": self.lan_rate_bps,
            "one_way_delay_s": self.one_way_delay_s,
            "lan_delay_s": self.lan_delay_s,
            "access_delay_s": self.access_delay_s,
            "uplink_buffer_pkts": self.uplink_buffer_pkts,
            "downlink_buffer_pkts": self.downlink_buffer_pkts,
            "duration_s": self.duration_s,
            "measurement_window": list(self.measurement_window),
            "seed": self.seed,
            "flows": [f.to_dict() for f in self.flows],
            "traffic_params_path": self.traffic_params_path,
            "packet_log": self.packet_log,
        }

    def sha256(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode("ascii")).hexdigest()

    def flow_by_role(self, role: str) -> Optional[FlowConfig]:
        for flow in self.flows:
            if flow.role == role:
                return flow
        return None


_SCENARIO_KEYS = {
    "uplink_rate_bps", "downlink_rate_bps", "lan_rate_bps", "one_way_delay_s",
    "lan_delay_s", "access_delay_s", "uplink_buffer_pkts",
    "downlink_buffer_pkts", "duration_s", "measurement_window", "seed",
    "flows", "traffic_params_path", "packet_log",
}

_FLOW_KEYS = {"role", "tcp_variant", "adv_window_segments", "start_s"}


def _parse_flow(raw: dict, index: int) -> FlowConfig:
    where = f"flows[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: must be a mapping")
    unknown = set(raw) - _FLOW_KEYS
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    role = raw.get("role")
    if role not in FLOW_ROLES:
        raise ConfigError(f"{where}.role: must be one of {FLOW_ROLES}, got {role!r}")
    variant = raw.get("tcp_variant", "sack")
    if variant not in TCP_VARIANTS:
        raise ConfigError(
            f"{where}.tcp_variant: must be one of {TCP_VARIANTS}, got {variant!r}")
    if role == "wow" and variant != "sack":
        raise ConfigError(
            f"{where}.tcp_variant: the wow flow always uses sack; "
            f"got {variant!r}")
    adv = _require_int(raw, "adv_window_segments", 64, 1)
    start = _require_num(raw, "start_s", 0.0, minimum=0.0, exclusive=False)
    return FlowConfig(role=role, tcp_variant=variant,
                      adv_window_segments=adv, start_s=start)


def parse_scenario(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("scenario: must be a mapping")
    unknown = set(raw) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"scenario: unknown keys {sorted(unknown)}")

    cfg = ScenarioConfig(
        uplink_rate_bps=_require_int(raw, "uplink_rate_bps", 512_000, 1),
        downlink_rate_bps=_require_int(raw, "downlink_rate_bps", 6_000_000, 1),
        lan_rate_bps=_require_int(raw, "lan_rate_bps", 100_000_000, 1),
        one_way_delay_s=_require_num(raw, "one_way_delay_s", 0.080),
        lan_delay_s=_require_num(raw, "lan_delay_s", 0.0001),
        access_delay_s=_require_num(raw, "access_delay_s", 0.001),
        uplink_buffer_pkts=_require_int(raw, "uplink_buffer_pkts", 200, 1),
        downlink_buffer_pkts=_require_int(raw, "downlink_buffer_pkts", 200, 1),
        duration_s=_require_num(raw, "duration_s", 1000.0),
        seed=_require_int(raw, "seed", 0, 0),
    )

    window = raw.get("measurement_window", [800.0, 1000.0])
    if (not isinstance(window, (list, tuple)) or len(window) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in window)):
        raise ConfigError("measurement_window: must be a pair of numbers")
    t0, t1 = float(window[0]), float(window[1])
    if t0 < 0 or t1 <= t0:
        raise ConfigError(
            f"measurement_window: need 0 <= start < end, got [{t0}, {t1}]")
    if t0 >= cfg.duration_s:
        raise ConfigError(
            "measurement_window: start must fall inside the run duration")
    cfg.measurement_window = (t0, t1)

    if "flows" in raw:
        flows_raw = raw["flows"]
        if not isinstance(flows_raw, list) or not flows_raw:
            raise ConfigError("flows: must be a non-empty list")
        flows = [_parse_flow(f, i) for i, f in enumerate(flows_raw)]
        roles = [f.role for f in flows]
        for role in FLOW_ROLES:
            if roles.count(role) > 1:
                raise ConfigError(f"flows: at most one {role!r} flow")
        cfg.flows = flows

    path = raw.get("traffic_params_path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("traffic_params_path: must be a string")
    cfg.traffic_params_path = path

    packet_log = raw.get("packet_log", False)
    if not isinstance(packet_log, bool):
        raise ConfigError("packet_log: must be a boolean")
    cfg.packet_log = packet_log
    return cfg


def load_raw_scenario(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("scenario file: top level must be a JSON object")
    return raw


def load_scenario(path: str) -> ScenarioConfig:
    return parse_scenario(load_raw_scenario(path))


def _component_list(section: dict, section_name: str, key: str) -> list:
    comps = section.get(key)
    if not isinstance(comps, list) or not comps:
        raise ConfigError(f"{section_name}.{key}: must be a non-empty list")
    return comps


def _check_composition(comps: list, section_name: str, key: str,
                       expected: dict) -> None:
    counts: dict = {}
    for comp in comps:
        if isinstance(comp, dict):
            counts[comp.get("kind")] = counts.get(comp.get("kind"), 0) + 1
    if counts != expected:
        raise ConfigError(
            f"{section_name}.{key}: expected component kinds {expected}, "
            f"got {counts}")


def load_traffic_params(path: Optional[str] = None) -> dict:
    """Load and structurally validate a traffic parameter file.

    Numeric values are free to vary; the component structure is fixed so
    that the workload keeps its shape: an eight-point command size table
    and four-part think-time mixture on the client, a lognormal size and
    five-part interval mixture on the server.
    """
    if path is None:
        text = resources.files("simrun.data").joinpath(
            "wow_questing.json").read_text(encoding="utf-8")
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"traffic params file: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"traffic params file: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("traffic params: must be a mapping")
    if raw.get("format") != TRAFFIC_FORMAT:
        raise ConfigError(
            f"traffic params: format must be {TRAFFIC_FORMAT!r}")
    known_top = {"format", "client", "server"}
    unknown = {k for k in raw if k not in known_top and not k.startswith("note")}
    if unknown:
        raise ConfigError(f"traffic params: unknown keys {sorted(unknown)}")
    out = {}
    for section_name in ("client", "server"):
        section = raw.get(section_name)
        if not isinstance(section, dict):
            raise ConfigError(f"traffic params: missing section {section_name!r}")
        unknown = {k for k in section
                   if k not in ("apdu_bytes", "iat_s") and not k.startswith("note")}
        if unknown:
            raise ConfigError(
                f"{section_name}: unknown keys {sorted(unknown)}")
        sizes = _component_list(section, section_name, "apdu_bytes")
        iats = _component_list(section, section_name, "iat_s")
        out[section_name] = {"apdu_bytes": sizes, "iat_s": iats}
    _check_composition(out["client"]["apdu_bytes"], "client", "apdu_bytes",
                       {"deterministic": 8})
    _check_composition(out["client"]["iat_s"], "client", "iat_s",
                       {"weibull": 2, "deterministic": 2})
    _check_composition(out["server"]["apdu_bytes"], "server", "apdu_bytes",
                       {"lognormal": 1})
    _check_composition(out["server"]["iat_s"], "server", "iat_s",
                       {"normal": 1, "weibull": 1, "deterministic": 3})
    return out
