"""Piecewise-linear two-state model of a single VO2 switch.

The switch is either OFF (high resistance) or ON (low resistance, with a
cutoff offset), with a hysteresis band between the holder voltage ``u_h``
and the effective threshold voltage. Thermal coupling from neighbouring
switches lowers the effective threshold while the neighbour conducts, so
the threshold seen by one switch depends on the instantaneous state of the
others. All functions here are pure and thread-safe.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Tuple


class SwitchFlag(enum.Enum):
    """Conduction state of a VO2 switch."""

    OFF = 0  # high-resistance branch
    ON = 1   # low-resistance branch

    @property
    def is_on(self) -> bool:
        return self is SwitchFlag.ON


@dataclass(frozen=True)
class SwitchParams:
    """Static I-V parameters of one switch.

    Voltages in volts, resistances in ohms. Defaults reproduce the device
    used throughout this package.
    """

    u_th: float = 5.0      # natural threshold voltage (OFF -> ON)
    u_h: float = 1.5       # holder voltage (ON -> OFF)
    u_cf: float = 0.82     # cutoff voltage of the ON branch
    r_off: float = 9100.0  # OFF-branch dynamic resistance
    r_on: float = 615.0    # ON-branch dynamic resistance

    def __post_init__(self) -> None:
        if not (self.u_th > self.u_h > self.u_cf > 0.0):
            raise ValueError(
                f"require u_th > u_h > u_cf > 0, got "
                f"({self.u_th}, {self.u_h}, {self.u_cf})"
            )
        if not (self.r_off > self.r_on > 0.0):
            raise ValueError(
                f"require r_off > r_on > 0, got ({self.r_off}, {self.r_on})"
            )


def iv_current(u: float, flag: SwitchFlag, p: SwitchParams) -> float:
    """Switch current in amperes at voltage ``u`` on the active branch.

    OFF branch: u / r_off.  ON branch: (u - u_cf) / r_on, which crosses
    zero exactly at the cutoff voltage. Negative voltages are admitted and
    return a signed current.
    """
    if flag.is_on:
        return (u - p.u_cf) / p.r_on
    return u / p.r_off


def effective_threshold(
    p: SwitchParams,
    incoming: Iterable[Tuple[float, SwitchFlag]],
) -> float:
    """Threshold voltage lowered by every currently conducting neighbour.

    ``incoming`` lists (coupling strength in volts, source state) pairs;
    only sources that are ON contribute. Strengths must be non-negative.
    """
    u_eff = p.u_th
    for strength, flag in incoming:
        if strength < 0.0:
            raise ValueError(f"coupling strength must be >= 0, got {strength}")
        if flag.is_on:
            u_eff -= strength
    return u_eff


def update_flag(
    flag: SwitchFlag, u: float, u_th_eff: float, u_h: float
) -> SwitchFlag:
    """One application of the switching rule.

    OFF turns ON when ``u`` exceeds the effective threshold (strict);
    ON turns OFF when ``u`` drops below the holder voltage (strict).
    Inside the open interval (u_h, u_th_eff) both states persist.
    """
    if flag.is_on:
        if u < u_h:
            return SwitchFlag.OFF
    elif u > u_th_eff:
        return SwitchFlag.ON
    return flag
