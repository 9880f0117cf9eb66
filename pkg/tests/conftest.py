import pytest

import repairchain as rc

# the four bundled jump families, one representative each
FAMILY_SPECS = {
    "geometric": {"family": "geometric", "p": 0.5},
    "explicit": {"family": "explicit", "a": [0.5, 0.2, 0.3]},
    "half_stable": {"family": "half_stable"},
    "power_zeta": {"family": "power_zeta", "alpha": 3.0},
}


@pytest.fixture(scope="session", params=sorted(FAMILY_SPECS))
def family_model(request):
    return rc.build_model(FAMILY_SPECS[request.param])


@pytest.fixture(scope="session")
def geo_half():
    return rc.geometric(0.5)


@pytest.fixture(scope="session")
def geo_quarter():
    return rc.geometric(0.25)


@pytest.fixture(scope="session")
def geo_three_quarter():
    return rc.geometric(0.75)
