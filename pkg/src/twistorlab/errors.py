"""Error types shared across the package."""


class DomainError(ValueError):
    """Input outside an operation's mathematical domain (bad point, bad structure)."""


class ConfigError(ValueError):
    """Invalid configuration: unknown metric/suite name or bad parameter."""


class UsageError(TypeError):
    """Arguments do not match the required arity or type pattern."""


class NumericError(RuntimeError):
    """A numerical scheme lost validity (step underflow, singular solve)."""
