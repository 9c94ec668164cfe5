"""Unit conventions.

Internally every rate is an *angular* rate in rad/us and every time is in
microseconds, so exp(-i H t) and exp(-rate * t) need no hidden 2*pi factors.

Coupling strengths are usually quoted as ``G / 2pi`` in MHz; those convert
with an explicit factor of 2*pi.  Damping rates quoted in "MHz" are
ambiguous: some groups quote the angular rate directly (a quoted 0.628 MHz
means 0.628 rad/us), others quote the linear rate (multiply by 2*pi).  Both
readings are supported behind an explicit ``convention`` flag; "angular" is
the default.
"""

from __future__ import annotations

import math

from .errors import ValidationError

TWO_PI = 2.0 * math.pi

#: Quoted MHz value is already the angular rate in rad/us.
RATE_ANGULAR = "angular"
#: Quoted MHz value is a linear frequency; multiply by 2*pi.
RATE_LINEAR = "linear"

RATE_CONVENTIONS = (RATE_ANGULAR, RATE_LINEAR)


def coupling_from_mhz_over_2pi(value: float) -> float:
    """Convert a coupling quoted as G/2pi in MHz to rad/us."""
    return TWO_PI * float(value)


def rate_from_quoted_mhz(value: float, convention: str = RATE_ANGULAR) -> float:
    """Convert a damping rate quoted in MHz to an angular rate in rad/us.

    Parameters
    ----------
    value : float
        The number as printed, e.g. ``kappa = 0.628`` (MHz).
    convention : str
        ``"angular"`` if the quoted number is already an angular rate,
        ``"linear"`` if it is a linear frequency (applies a 2*pi factor).
    """
    if convention not in RATE_CONVENTIONS:
        raise ValidationError(
            f"unknown rate convention {convention!r}; expected one of {RATE_CONVENTIONS}"
        )
    value = float(value)
    if convention == RATE_LINEAR:
        return TWO_PI * value
    return value
