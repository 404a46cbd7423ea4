from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings as hyp_settings
from mpmath import mp

hyp_settings.register_profile(
    "hh",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
hyp_settings.load_profile("hh")


@pytest.fixture(autouse=True)
def precision():
    with mp.workprec(256):
        yield
