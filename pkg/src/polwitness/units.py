"""Unit conventions and experimental constants.

Internally, angular frequencies are in rad/ps, times in ps and lengths in mm.
"""
import math

#: speed of light in mm/ps
C_MM_PER_PS = 0.299792458
#: speed of light in nm/ps
C_NM_PER_PS = 299792.458

#: laboratory values of the quantum-dot experiment
LINEWIDTH_PS = 9.703  # 1/delta_omega
WAVELENGTH_NM = 914.0
CALCITE_BIREFRINGENCE = 0.179
CALCITE_LENGTH_MM = 35.92
CALCITE_STEP_MM = 8.98
FIBER_LENGTH_MM = 120e3
FIBER_BIREFRINGENCE = 3e-4


def wavelength_to_omega(wavelength_nm):
    """Angular frequency (rad/ps) of light with the given vacuum wavelength."""
    return 2.0 * math.pi * C_NM_PER_PS / wavelength_nm


def crystal_time(length_mm, birefringence):
    """Polarization-conditional delay ``L * dn / c`` (ps) of a birefringent element."""
    return length_mm * birefringence / C_MM_PER_PS


def mirror_to_delay(x_mm):
    """Delay (ps) of a Michelson arm displaced by ``x_mm`` (double pass)."""
    return 2.0 * x_mm / C_MM_PER_PS


def delay_to_mirror(tau_ps):
    """Inverse of :func:`mirror_to_delay`."""
    return C_MM_PER_PS * tau_ps / 2.0
