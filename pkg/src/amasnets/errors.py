"""Exception hierarchy shared by every module.

Each error class maps to one CLI exit code (see ``amasnets.cli``).
"""


class NetError(Exception):
    """Base class for all library errors."""

    exit_code = 2


class StructuralError(NetError):
    """Malformed input: unknown references, clashing names, bad shapes."""


class FiringError(NetError):
    """A transition was fired in a marking where it is not enabled."""


class SafetyError(NetError):
    """Firing would put a second token on an already marked place."""

    def __init__(self, marking, transition):
        self.marking = marking
        self.transition = transition
        super().__init__(
            f"1-safety violated firing {transition!r} in marking {sorted(marking)}")


class CapacityError(NetError):
    """A configured exploration bound was exceeded."""

    exit_code = 3


class SynthesisError(NetError):
    """Exact synthesis impossible; carries the separation report."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"separation properties fail: {report.summary()}")


class CompositionError(NetError):
    """A composition precondition does not hold."""


class ProjectionError(NetError):
    """A subnet place cannot be resolved in the projected marking."""


class ModuleError(NetError):
    """A reactive module is ill-formed or a closure input is partial."""


class DocumentError(NetError):
    """An interchange document failed to parse or validate."""

    def __init__(self, message, path="$"):
        self.path = path
        super().__init__(f"{path}: {message}")
