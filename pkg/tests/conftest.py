import random

from hypothesis import HealthCheck, settings, strategies as st

from reference import random_admg, random_expression

settings.register_profile(
    "default", deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

expressions = st.builds(lambda r: random_expression(r, 5), st.randoms(use_true_random=False))
admgs = st.builds(lambda seed: random_admg(random.Random(seed)), st.integers(0, 2**32 - 1))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda s: int(s.split("[")[1].split("]")[0])):
        terminalreporter.write_line(line)
