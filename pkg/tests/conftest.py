import sys
import warnings
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tipinfo import ModelParams, info_curves, krackhardt_kite  # noqa: E402
from tipinfo.features import curve_features, role_scores  # noqa: E402

# Kite operating point shared by the kite-specific tests.
KITE_BETA = 0.534


@pytest.fixture(scope="session")
def kite():
    return krackhardt_kite()


@pytest.fixture(scope="session")
def kite_params():
    return ModelParams(beta=KITE_BETA)


@pytest.fixture(scope="session")
def kite_curves(kite, kite_params):
    return info_curves(kite, kite_params, t_max=300)


@pytest.fixture(scope="session")
def kite_roles(kite, kite_curves):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        feats = curve_features(kite_curves, kite.n)
    return role_scores(feats.mu, feats.omega)
