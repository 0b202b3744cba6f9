import numpy as np
import pytest

from trisrsma.modules.channel import NearFieldChannel, UserChannel, assemble
from trisrsma.modules.scenario import default_config


def build_channels(cu, pu=()):
    """ChannelSet whose effective vectors are exactly the given rows (unit feed)"""
    cu = [np.asarray(f, dtype=complex) for f in cu]
    pu = [np.asarray(f, dtype=complex) for f in pu]
    m = cu[0].shape[0]

    def user(f):
        return UserChannel(g=f, pathloss=1.0, rician_k=1.0, azimuth=0.0, elevation=0.0, distance_m=1.0)

    feed = NearFieldChannel(h=np.ones(m, dtype=complex), feed_gain=1.0)
    return assemble(feed, [user(f) for f in cu], [user(f) for f in pu])


@pytest.fixture
def make_channels():
    return build_channels


@pytest.fixture
def cfg():
    return default_config()
