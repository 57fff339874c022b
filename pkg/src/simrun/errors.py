"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """A scenario, traffic parameter file, or CLI override is invalid."""


class SimulationError(RuntimeError):
    """The simulation reached an inconsistent state."""


class SchedulingInPastError(SimulationError):
    """An event was scheduled before the current clock."""


class LivelockError(SimulationError):
    """Too many events fired at a single instant without the clock advancing."""
