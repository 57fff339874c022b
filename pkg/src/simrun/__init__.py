"""Deterministic discrete-event simulator for TCP flow coexistence studies.

Models a small game-style flow and a bulk upload sharing an asymmetric
access link, with selectable TCP variants and drop-tail buffers, and emits
reproducible CSV/JSON measurement bundles.
"""

from ._core import BACKEND
from ._version import __version__
from .config import (FlowConfig, ScenarioConfig, load_scenario,
                     load_traffic_params, parse_scenario)
from .errors import (ConfigError, LivelockError, SchedulingInPastError,
                     SimulationError)
from .kernel import Event, Kernel, NS_PER_S, RunStats, s_to_ticks, ticks_to_s
from .metrics import (MetricsRecorder, analytic_delay_oracle, format_time_ns,
                      summarize_samples, time_weighted_mean)
from .netstack import (DropTailQueue, Interface, Link, Node, Packet,
                       TcpHeader, Topology, build_dumbbell, serialization_ns)
from .runner import RunResult, make_rng, run_scenario, sweep
from .tcp import (MSS, RtoEstimator, TcpFlow, TcpReceiver, TcpSender,
                  vegas_diff)
from .traffic import ApduSource, FtpSource, MixtureDistribution

__all__ = [
    "ApduSource", "BACKEND", "ConfigError", "DropTailQueue", "Event",
    "FlowConfig", "FtpSource", "Interface", "Kernel", "Link", "LivelockError",
    "MetricsRecorder", "MixtureDistribution", "MSS", "NS_PER_S", "Node",
    "Packet", "RtoEstimator", "RunResult", "RunStats", "ScenarioConfig",
    "SchedulingInPastError", "SimulationError", "TcpFlow", "TcpHeader",
    "TcpReceiver", "TcpSender", "Topology", "analytic_delay_oracle",
    "build_dumbbell", "format_time_ns", "load_scenario",
    "load_traffic_params", "make_rng", "parse_scenario", "run_scenario",
    "s_to_ticks", "serialization_ns", "summarize_samples", "sweep",
    "ticks_to_s", "time_weighted_mean", "vegas_diff", "__version__",
]
