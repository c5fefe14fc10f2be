import functools

import numpy as np
import pytest

from bathflow.pauli import PauliOperator

# independent single-qubit matrices for kron-built oracles
I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
MATS = {"I": I2.astype(complex), "X": X, "Y": Y, "Z": Z}


def kron_string(label: str) -> np.ndarray:
    return functools.reduce(np.kron, [MATS[ch] for ch in label])


def kron_operator(terms: dict[str, float]) -> np.ndarray:
    return sum(c * kron_string(lab) for lab, c in terms.items())


def random_labels(rng, n, count):
    letters = np.array(list("IXYZ"))
    return ["".join(rng.choice(letters, n)) for _ in range(count)]


def random_operator(rng, n, count, scale=1.0) -> PauliOperator:
    labels = random_labels(rng, n, count)
    return PauliOperator(n, [(lab, scale * rng.normal()) for lab in labels])


def random_density(rng, n, rank=None) -> np.ndarray:
    dim = 1 << n
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def z_kraus(n, q):
    return kron_string("".join("Z" if i == q else "I" for i in range(n)))


# -- acceptance reporting ------------------------------------------------------

_RESULTS: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    key, title = mark.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        _RESULTS[key] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_RESULTS, key=lambda k: int(k[1:])):
        status, title = _RESULTS[key]
        terminalreporter.write_line(f"{key} {status}: {title}")
