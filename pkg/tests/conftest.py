import warnings

import pytest

from fracdiff.errors import TruncationWarning


@pytest.fixture(autouse=True)
def _quiet_truncation_warnings():
    # randomized 1/k^4 fixtures legitimately sit near the truncation
    # threshold; the warning itself has a dedicated test
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield
