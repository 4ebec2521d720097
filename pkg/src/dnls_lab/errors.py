"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation was invoked outside its documented domain."""


class AbortError(RuntimeError):
    """A simulation tripped a guard (blowup or drift) and was abandoned."""


class ConfigError(Exception):
    """A scenario configuration could not be parsed or validated."""
