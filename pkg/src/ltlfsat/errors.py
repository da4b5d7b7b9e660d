"""Resource-limit errors shared across the package.

These are raised instead of returning a verdict: a run that hits a limit
aborts loudly and never reports sat/unsat.
"""


class ResourceAbort(RuntimeError):
    """A run exceeded a configured resource limit."""

    def __init__(self, kind, message):
        super().__init__(message)
        self.kind = kind


class StateLimitExceeded(ResourceAbort):
    def __init__(self, limit):
        super().__init__("state_limit", f"state limit of {limit} states exceeded")
        self.limit = limit


class TimeoutExceeded(ResourceAbort):
    def __init__(self, seconds):
        super().__init__("timeout", f"timeout of {seconds}s exceeded")
        self.seconds = seconds


class FrameLimitExceeded(ResourceAbort):
    def __init__(self, limit):
        super().__init__("max_frames", f"frame limit of {limit} exceeded")
        self.limit = limit


class SatCallLimitExceeded(ResourceAbort):
    def __init__(self, limit):
        super().__init__("max_sat_calls", f"SAT call limit of {limit} exceeded")
        self.limit = limit


class SolverBudgetExceeded(ResourceAbort):
    def __init__(self, budget):
        super().__init__("solver_budget", f"solver conflict budget of {budget} exceeded")
        self.budget = budget
