"""CODATA unit conversions between lab units and the internal k_B = 1 system.

Internally energies and temperatures are measured in units of the bath gap.
"""
PLANCK = 6.62607015e-34  # J s
BOLTZMANN = 1.380649e-23  # J / K


def gap_joules(freq_ghz):
    return PLANCK * freq_ghz * 1e9


def thermal_energy_joules(t0_mk):
    return BOLTZMANN * t0_mk * 1e-3


def reduced_temperature(freq_ghz, t0_mk):
    """``k_B T0 / (h f)``: base temperature in units of the bath gap."""
    return thermal_energy_joules(t0_mk) / gap_joules(freq_ghz)


def gap_over_temperature(freq_ghz, t0_mk):
    return 1.0 / reduced_temperature(freq_ghz, t0_mk)


def to_zeptojoules(energy_in_gap_units, freq_ghz):
    return energy_in_gap_units * gap_joules(freq_ghz) * 1e21
