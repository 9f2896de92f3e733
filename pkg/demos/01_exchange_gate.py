"""The resonant exchange gate between the bus and one TLS.

Tuning the bus onto a TLS turns on an excitation exchange: |1g> and |0e>
rotate into each other at the coupling rate while |0g> and |1e> sit still.
Held for exactly tau = pi / (2S) the window is a full swap with a -i phase
on the transferred excitation.
"""

import numpy as np

from phasebus import basis_state, load_config, resonant_evolution

config = load_config("demos/device_config.json")
j = 1
tau = config.swap_time(j)
print(f"TLS {j}: splitting {config.tls_params(j).splitting_hz / 1e6:.2f} MHz, "
      f"full swap in {tau * 1e9:.3f} ns\n")

print("truth table at t = tau (amplitudes on |0g>, |1g>, |0e>, |1e>):")
for label in ("0g", "1g", "0e", "1e"):
    padded = label + "g" * (config.num_tls - 1)
    out = resonant_evolution(basis_state(padded), j, tau, config)
    amps = out.amplitudes.reshape(-1)[:4]
    pretty = ", ".join(f"{a.real:+.2f}{a.imag:+.2f}j" for a in amps)
    print(f"  |{label}>  ->  [{pretty}]")

print("\nexcitation oscillation from |1g>:")
for frac in np.linspace(0, 2, 9):
    out = resonant_evolution(basis_state("1" + "g" * config.num_tls), j, frac * tau, config)
    p_bus = abs(out.amplitudes[1]) ** 2
    p_tls = abs(out.amplitudes[2]) ** 2
    print(f"  t = {frac:4.2f} tau   P(bus excited) = {p_bus:.4f}   "
          f"P(TLS excited) = {p_tls:.4f}")
