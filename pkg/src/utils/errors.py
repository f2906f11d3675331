"""Exception hierarchy shared by the library and the CLI."""


class ScboError(Exception):
    """Base class for every error raised on purpose by this package."""

    exit_code = 1


class ConfigError(ScboError, ValueError):
    """Invalid configuration, schema violation or violated precondition."""

    exit_code = 2


class UnknownObjectiveError(ConfigError, KeyError):
    """Objective id not present in the registry."""

    exit_code = 3

    def __str__(self) -> str:
        # KeyError quotes its message; keep it readable
        return str(self.args[0]) if self.args else "unknown objective"


class ArtifactError(ScboError, OSError):
    """Output directory or artifact file cannot be written."""

    exit_code = 4


class NumericalError(ScboError, ArithmeticError):
    """Non-finite values or degenerate weights during a computation."""

    exit_code = 5


class DivergenceError(NumericalError):
    """A particle coordinate left the finite range allowed for a run."""

    exit_code = 5
