"""Per-run convergence records and the MVP counter."""
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field

DACG = "DACG"
NEWTON = "NEWTON"
JD = "JD"

TRACE_COLUMNS = ("level", "phase", "outer_iter", "inner_iter", "cumulative_mvp",
                 "eigenresidual_rel", "theta")


@dataclass
class TraceRow:
    level: int
    phase: str
    outer_iter: int
    inner_iter: int
    cumulative_mvp: int
    eigenresidual_rel: float
    theta: float

    def astuple(self):
        return tuple(getattr(self, c) for c in TRACE_COLUMNS)


@dataclass
class ConvergenceTrace:
    """Owns the MVP counter of one solver run plus its history.

    ``mvp`` is incremented by :func:`spectra.sparse.matvec`; ``mvp_by_phase``
    splits the total between DACG and Newton (or JD) work.
    """

    mvp: int = 0
    rows: list = field(default_factory=list)
    wall: dict = field(default_factory=lambda: defaultdict(float))
    mvp_by_phase: dict = field(default_factory=lambda: defaultdict(int))
    events: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def record(self, level, phase, outer_iter, inner_iter, rel, theta):
        self.rows.append(TraceRow(level, phase, outer_iter, inner_iter, self.mvp, rel, theta))

    @contextmanager
    def phase(self, name):
        """Attribute wall-clock and MVPs spent inside the block to ``name``."""
        t0, m0 = time.perf_counter(), self.mvp
        try:
            yield
        finally:
            self.wall[name] += time.perf_counter() - t0
            self.mvp_by_phase[name] += self.mvp - m0

    def note(self, message):
        self.events.append(message)
