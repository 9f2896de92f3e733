import numpy as np
import pytest

from phasebus.device import BiasModel, DeviceConfig, TlsParams

GHZ = 2 * np.pi * 1e9
MHZ = 2 * np.pi * 1e6


def simple_config(num_tls: int, readout_fidelity: float = 1.0) -> DeviceConfig:
    """Evenly spaced TLSs with distinct couplings; no bias model."""
    tls = tuple(
        TlsParams(f"t{k}", (5.0 + 0.2 * k) * GHZ, (20 + 7 * k) * MHZ)
        for k in range(num_tls)
    )
    return DeviceConfig(omega10=6.0 * GHZ, tls=tls, readout_fidelity=readout_fidelity)


def ten_defect_config(seed: int = 42, num_tls: int = 10) -> DeviceConfig:
    """Ten defects, splittings 20..100 MHz, lines ~200 MHz apart over ~2 GHz."""
    rng = np.random.default_rng(seed)
    f_r = 5.0e9 + 200e6 * np.arange(num_tls) + rng.uniform(-30e6, 30e6, num_tls)
    deltas = rng.uniform(20e6, 100e6, num_tls)
    tls = tuple(
        TlsParams(f"t{k}", 2 * np.pi * f_r[k], np.pi * deltas[k])
        for k in range(num_tls)
    )
    return DeviceConfig(
        omega10=6.0 * GHZ,
        tls=tls,
        readout_fidelity=0.96,
        bias_model=BiasModel(omega_p0=2 * np.pi * 7.6e9),
    )


@pytest.fixture
def config3():
    return simple_config(3)


@pytest.fixture
def config5():
    return simple_config(5)
