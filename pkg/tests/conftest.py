import numpy as np
import pytest
from hypothesis import settings

from eadf.geometry import AngularGrid
from eadf.pattern import RadiationPattern

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


def random_pattern(grid: AngularGrid, seed: int = 0, frequency: float = 28.5e9) -> RadiationPattern:
    rng = np.random.default_rng(seed)
    data = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return RadiationPattern(grid, data, frequency)


def series_coefficients(kt: int, kp: int, seed: int) -> np.ndarray:
    """Random coefficients of a Fourier series invariant under the antipodal map."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((2 * kt + 1, 2 * kp + 1)) + 1j * rng.standard_normal((2 * kt + 1, 2 * kp + 1))
    sign = (-1.0) ** np.arange(-kp, kp + 1)
    return 0.5 * (c + sign * c[::-1, :])


def evaluate_series(c: np.ndarray, theta, phi) -> np.ndarray:
    kt = (c.shape[0] - 1) // 2
    kp = (c.shape[1] - 1) // 2
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    out = np.zeros(theta.shape, dtype=complex)
    for i, k in enumerate(range(-kt, kt + 1)):
        for j, l in enumerate(range(-kp, kp + 1)):
            out += c[i, j] * np.exp(1j * (k * theta + l * phi))
    return out


def brute_force_eadf(C: np.ndarray) -> np.ndarray:
    """Literal double sum over the extended pattern; rows/cols are kappa=-M.., nu=-N.."""
    two_m, two_n = C.shape
    M, N = two_m // 2, two_n // 2
    Q = np.zeros((two_m, two_n), dtype=complex)
    m = np.arange(two_m)
    n = np.arange(two_n)
    for i, kappa in enumerate(range(-M, M)):
        for j, nu in enumerate(range(-N, N)):
            kernel = np.exp(-1j * np.pi * kappa * m / M)[:, None] * np.exp(-1j * np.pi * nu * n / N)[None, :]
            Q[i, j] = np.sum(C * kernel) / (4 * M * N)
    return Q


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    """Remember one acceptance outcome; all are printed in the terminal summary."""
    line = f"{name}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
