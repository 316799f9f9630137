import pytest

from mps2cl.errors import ERROR_HANDLER, SolverError, BoundViolation, VerdictError
from mps2cl.verdicts import Verdict


def test_stop_mode_raises_on_error():
    ERROR_HANDLER.set_stop()
    ERROR_HANDLER.warning('cause', 'cause: only logged')
    assert not ERROR_HANDLER.failed
    with pytest.raises(VerdictError) as e:
        ERROR_HANDLER.error('cause', 'cause: stops')
    assert e.value.cause == 'cause'
    assert ERROR_HANDLER.failures == ['cause: stops']


def test_failure_is_logged_once(caplog):
    ERROR_HANDLER.set_stop()
    verdict = Verdict.upper('some_bound', 2.0, 1.0)
    with pytest.raises(VerdictError):
        ERROR_HANDLER.error(verdict.name, verdict.describe())
    assert caplog.records[-1].getMessage() == verdict.describe()
    assert 'some_bound: some_bound' not in caplog.text


def test_log_mode_collects_failures():
    ERROR_HANDLER.set_log()
    ERROR_HANDLER.error('first', 'first: bad')
    ERROR_HANDLER.critical('second', 'second: worse')
    assert ERROR_HANDLER.failures == ['first: bad', 'second: worse']
    ERROR_HANDLER.reset()
    assert not ERROR_HANDLER.failed


def test_error_messages():
    assert 'residual' in str(SolverError('no convergence', 1e-3))
    violation = BoundViolation('projector distance', 2.0, 1.0)
    assert violation.measured == 2.0
    assert 'projector distance violated' in str(violation)


def test_verdicts():
    assert Verdict.upper('a', 1.0, 2.0).passed
    assert Verdict.upper('a', 2.0, 1.0).failed
    assert Verdict.upper('a', 1.0 + 1e-12, 1.0, tol=1e-10).passed
    inapplicable = Verdict.upper('a', 5.0, None)
    assert not inapplicable.applicable
    assert not inapplicable.failed
    assert 'inapplicable' in inapplicable.describe()
    assert Verdict.lower('b', 0.3, 0.5).failed
    assert 'FAIL' in Verdict.lower('b', 0.3, 0.5).describe()
