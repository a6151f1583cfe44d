"""Unit conversions between the kHz figures quoted for the experiment and the
internal SI-like units (rad/s for drives and detunings, 1/s for rates).

Drive and detuning figures are quoted as ``X/2pi`` in kHz, so they pick up a
factor 2pi. Decay rates are quoted directly in kHz and are used as
angular-equivalent rates without the 2pi; this is the only reading under
which every quoted stroke lands on the phase it is supposed to be in.
"""
import math

TWO_PI = 2.0 * math.pi
US = 1e-6


def khz_to_rad(x):
    return TWO_PI * x * 1e3


def rad_to_khz(x):
    return x / (TWO_PI * 1e3)


def rate_khz(x):
    return x * 1e3


def rate_to_khz(x):
    return x / 1e3
