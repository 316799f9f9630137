import logging

from typing import List

from mps2cl.logger import LOGGER


class InputError(ValueError):
    """Rejected input: caps exceeded, dimension mismatch, bad parameters."""


class GenericityError(InputError):
    """No block length up to the cap spans the full matrix algebra, or the
    peripheral transfer spectrum is degenerate."""


class SolverError(RuntimeError):

    def __init__(self, message: str, residual: float):
        super().__init__(f'{message} (residual {residual:.3e})')
        self.residual = residual


class BoundViolation(RuntimeError):

    def __init__(self, inequality: str, measured: float, bound: float):
        super().__init__(f'{inequality} violated: {measured:.6e} > {bound:.6e}')
        self.inequality = inequality
        self.measured = measured
        self.bound = bound


class VerdictError(RuntimeError):
    """A failed or inapplicable check. ``message`` is logged as is and names
    the check itself; ``cause`` is the check name."""

    def __init__(self, cause: str, message: str, level: int):
        super().__init__(message)
        self.cause = cause
        self.message = message
        self.level = level


def _log_handle(error: VerdictError):
    LOGGER.log(level=error.level, msg=error.message)


def _stop_handle(error: VerdictError):
    # cli.run writes the results, then exits 1
    if error.level >= logging.ERROR:
        LOGGER.critical(msg=error.message)
        raise error
    _log_handle(error=error)


class VerdictErrorHandler:

    def __init__(self):
        self._handler = _stop_handle
        self.failures = []  # type: List[str]

    def set_log(self):
        self._handler = _log_handle

    def set_stop(self):
        self._handler = _stop_handle

    def reset(self):
        self.failures.clear()

    @property
    def failed(self) -> bool:
        return len(self.failures) > 0

    def warning(self, cause: str, message: str):
        self._handler(VerdictError(cause=cause, message=message, level=logging.WARNING))

    def error(self, cause: str, message: str):
        self.failures.append(message)
        self._handler(VerdictError(cause=cause, message=message, level=logging.ERROR))

    def critical(self, cause: str, message: str):
        self.failures.append(message)
        self._handler(VerdictError(cause=cause, message=message, level=logging.CRITICAL))


ERROR_HANDLER = VerdictErrorHandler()
