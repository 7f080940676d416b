"""Exception hierarchy shared by the library and the command line."""


class SpincomError(Exception):
    """Base class for all errors raised by spincom."""

    exit_code = 1


class ParameterError(SpincomError, ValueError):
    """A parameter or profile value violates a physical or format constraint."""

    exit_code = 2


class ProfileError(ParameterError):
    """Malformed profile file. ``lineno`` is 1-based when known."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class InstabilityError(SpincomError):
    """The linearized dynamics have no stationary state."""

    exit_code = 3


class SingularResponseError(InstabilityError):
    """``-i*omega - A`` is singular at the requested Fourier frequency."""


class BlindSensorError(SpincomError, ValueError):
    """The force signal does not reach the detected quadrature (zero response)."""

    exit_code = 2
