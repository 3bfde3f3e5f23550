import numpy as np
import pytest

# acceptance outcomes, printed as one line each at the end of the run
ACCEPTANCE = {}


def record(criterion, passed, detail=""):
    ACCEPTANCE[criterion] = (bool(passed), detail)
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} {detail}".rstrip()
    print(line)
    return line


def summary_lines():
    """One line per criterion; sub-cases (``"3:name"``) fold into their parent."""
    groups = {}
    for key, (passed, detail) in ACCEPTANCE.items():
        head, _, sub = key.partition(":")
        groups.setdefault(head, []).append((sub, passed, detail))
    lines = []
    for head in sorted(groups, key=int):
        entries = groups[head]
        if len(entries) == 1 and not entries[0][0]:
            _, passed, detail = entries[0]
        else:
            failed = [sub for sub, ok, _ in entries if not ok]
            passed = not failed
            detail = f"{len(entries) - len(failed)}/{len(entries)} sub-cases pass"
            if failed:
                detail += "; failing: " + ", ".join(sorted(failed))
        lines.append(f"criterion {head}: {'PASS' if passed else 'FAIL'} {detail}".rstrip())
    return lines


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in summary_lines():
        terminalreporter.write_line(line)


@pytest.fixture
def three_state():
    """The 3-state lumpable example; states 1,2 (0-indexed 0,1) form one aggregate."""
    return np.array([[3, 0, 1], [1, 2, 1], [0, 2, 2]], dtype=float) / 4.0
