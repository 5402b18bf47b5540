from pathlib import Path

import pytest

from fdsic.channel import ChannelTap, default_path_loss, taps_from_geometry
from fdsic.signals import SignalSpec, gen_ofdm

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def oracle_frozen():
    """Frozen oracle outputs (key -> float), regenerated by
    scripts/freeze_oracle_values.py."""
    values = {}
    for line in (DATA_DIR / "oracle_frozen.txt").read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, val = line.split("=")
        values[key.strip()] = float(val)
    return values


@pytest.fixture(scope="session")
def default_channel():
    """Circulator tap plus reflectors at 12.5 cm and 30 cm at 2.395 GHz."""
    circ = ChannelTap(gain=10 ** (-18 / 20), delay_s=0.5e-9)
    return taps_from_geometry([0.125, 0.30], default_path_loss(), 2.395e9,
                              extra_taps=[circ])


@pytest.fixture(scope="session")
def ofdm_frame_20mhz():
    spec = SignalSpec(kind="ofdm", bandwidth_hz=20e6, num_symbols=12, seed=3)
    return gen_ofdm(spec)
