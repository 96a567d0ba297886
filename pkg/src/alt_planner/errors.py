"""Exception hierarchy shared across the planner."""


class PlannerError(Exception):
    """Base class for all alt-planner errors."""


class DimensionError(PlannerError, ValueError):
    """Vector/matrix shapes do not agree."""


class NonIdentifiableError(PlannerError, RuntimeError):
    """Censored-likelihood refit has no finite maximizer (singular Hessian
    or divergence, e.g. every observation censored along some direction)."""


class ScheduleExhaustedError(PlannerError, RuntimeError):
    """A pre-built design schedule has no runs left."""


class ConfigError(PlannerError, ValueError):
    """Invalid study or session configuration. ``messages`` maps field name
    to a human-readable problem description."""

    def __init__(self, messages: dict[str, str] | str):
        if isinstance(messages, str):
            messages = {"config": messages}
        self.messages = dict(messages)
        super().__init__("; ".join(f"{k}: {v}" for k, v in self.messages.items()))
