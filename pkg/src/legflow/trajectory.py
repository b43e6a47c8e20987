from dataclasses import dataclass, field

import numpy as np


@dataclass
class FlowTrajectory:
    """Time-stamped curve states with one diagnostics record per state."""

    times: np.ndarray
    states: list
    diagnostics: list = field(default_factory=list)
    kind: str = "expanding"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.states) != self.times.size:
            raise ValueError("times and states differ in length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return self.times.size

    def diagnostic(self, name):
        return np.array([d[name] for d in self.diagnostics])

    @property
    def final(self):
        return self.states[-1]
