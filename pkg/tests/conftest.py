import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from snailbudget.params import from_mapping  # noqa: E402

ISWAP_DOC = {
    "n_qubits": 4,
    "g3_over_2pi_hz": 60e6,
    "lambda": 0.1,
    "t1_s": 80e-6,
    "band_lo_hz": 4.0e9,
    "band_hi_hz": 5.0e9,
    "gate": "iswap",
    "target_fidelity": 0.99,
    "delta_q_hz": 180e6,
}

SQRT_ISWAP_DOC = {
    "n_qubits": 4,
    "g3_over_2pi_hz": 60e6,
    "lambda": 0.08,
    "t1_s": 160e-6,
    "band_lo_hz": 4.0e9,
    "band_hi_hz": 6.0e9,
    "gate": "sqrt_iswap",
    "target_fidelity": 0.99,
    "delta_q_hz": 540e6,
}


def make_config(base=ISWAP_DOC, **overrides):
    doc = dict(base)
    doc.update(overrides)
    return from_mapping(doc)


def toml_text(doc):
    lines = []
    for k, v in doc.items():
        if isinstance(v, str):
            lines.append(f'{k} = "{v}"')
        elif isinstance(v, list):
            lines.append(f"{k} = [{', '.join(repr(x) for x in v)}]")
        else:
            lines.append(f"{k} = {v!r}")
    return "\n".join(lines) + "\n"


@pytest.fixture
def iswap_config():
    return make_config()


@pytest.fixture
def sqrt_iswap_config():
    return make_config(SQRT_ISWAP_DOC)


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        prev = _ACCEPTANCE.get(name)
        if prev is None or report.outcome != "passed":
            _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        verdict = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
