import numpy as np
import pytest

from ioscope.series import TimeSeries


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def noise_series(rng):
    return TimeSeries(rng.standard_normal(512))


def write_series_csv(path, values, timestamps=None):
    with open(path, "w") as fh:
        if timestamps is None:
            fh.write("value\n")
            for v in values:
                fh.write(f"{float(v)!r}\n")
        else:
            fh.write("timestamp,value\n")
            for t, v in zip(timestamps, values):
                fh.write(f"{float(t)!r},{float(v)!r}\n")
    return str(path)
