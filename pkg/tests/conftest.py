import numpy as np
import pytest

import aircomp_fa as af

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def record_acceptance(name: str, outcome: str) -> None:
    _ACCEPTANCE_RESULTS.append((name, outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        record_acceptance(marker.args[0], "PASS" if report.passed else "FAIL")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, outcome in _ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"[{outcome}] {name}")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): acceptance criterion; name is printed in the summary"
    )


@pytest.fixture
def tiny_config():
    """K=1, N=1 scenario with unit gain and zero steering phase at x=0."""
    return af.SystemConfig(
        num_users=1,
        num_antennas=1,
        aperture_length=8.0,
        min_spacing=0.5,
        wavelength=1.0,
        path_loss_exponent=2.0,
        noise_power=1.0,
        power_caps=[1.0],
        uncertainty_widths=[0.0],
        user_distances=[1.0],
        nominal_angles=[np.pi / 2],
    )
