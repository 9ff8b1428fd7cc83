import contextlib

import pytest

_RESULTS = {}


@pytest.fixture
def criterion(capsys):
    """``with criterion(n, title) as note:`` records one pass/fail line.

    ``note(text)`` attaches measured numbers to the line.
    """
    @contextlib.contextmanager
    def run(n, title):
        details = []
        try:
            yield details.append
        except BaseException as e:
            _RESULTS[n] = ("FAIL", title, "; ".join(details + [f"{type(e).__name__}: {e}"]))
            raise
        else:
            _RESULTS[n] = ("PASS", title, "; ".join(details))
        finally:
            status, _, detail = _RESULTS[n]
            with capsys.disabled():
                print(f"\ncriterion {n} {status}: {title} ({detail})")
    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, title, detail = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n} {status}: {title} ({detail})")
