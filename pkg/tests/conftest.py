import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_cov(rng, n_modes, noise=0.3):
    """Random physical CM: symplectic image of a thermal diagonal."""
    from scipy.linalg import expm
    from gaussqi.gaussian import symplectic_form

    omega = symplectic_form(n_modes)
    h = rng.normal(size=(2 * n_modes, 2 * n_modes))
    h = 0.3 * (h + h.T)
    s = expm(omega @ h)
    nu = 0.5 + noise * rng.random(n_modes)
    return s @ np.diag(np.tile(nu, 2)) @ s.T, nu


ACCEPTANCE_KEY = pytest.StashKey[list]()


class Criterion:
    """Collects named sub-checks of one acceptance criterion."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.checks = []

    def check(self, name, ok, value):
        self.checks.append((name, bool(ok), value))

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        shown = self.checks if self.passed else [c for c in self.checks if not c[1]]
        detail = "; ".join(f"{n}={v}" for n, _, v in shown)
        return f"{status} criterion {self.number} [{self.title}]: {detail}"


@pytest.fixture
def criterion(request):
    made = []

    def factory(number, title):
        made.append(Criterion(number, title))
        return made[-1]

    yield factory
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])
    lines.extend(crit.line() for crit in made)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
