"""Wavelength-tagged photons, pulses, spectral detectors and filters.

Wavelength is a classical tag: photons at different wavelengths are
perfectly distinguishable and a wavelength is never in superposition.
All intervals are closed and in nanometres.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .quantum import QuantumRegister

# Canonical wavelengths: near-infrared signal inside the silicon
# detector window, far-infrared spy photon far outside it, and a
# narrowband filter centred on the signal.
SIGNAL_WAVELENGTH_NM = 800.0
DETECTOR_WINDOW_NM = (600.0, 900.0)
EVE_WAVELENGTH_NM = 190_000.0
FILTER_HALF_WIDTH_NM = 0.05


def _check_interval(name: str, interval: tuple[float, float]) -> None:
    lo, hi = interval
    if not 0 < lo < hi:
        raise ValueError(f"{name} must satisfy 0 < lo < hi, got [{lo}, {hi}]")


@dataclass(frozen=True)
class Detector:
    """Single-photon detector sensitive only inside its spectral window."""

    window_nm: tuple[float, float] = DETECTOR_WINDOW_NM

    def __post_init__(self) -> None:
        _check_interval("detector window", self.window_nm)


@dataclass(frozen=True)
class OpticalFilter:
    """Input filter transmitting only its passband; everything else is absorbed."""

    passband_nm: tuple[float, float]

    def __post_init__(self) -> None:
        _check_interval("filter passband", self.passband_nm)


def default_filter(center_nm: float = SIGNAL_WAVELENGTH_NM) -> OpticalFilter:
    return OpticalFilter((center_nm - FILTER_HALF_WIDTH_NM, center_nm + FILTER_HALF_WIDTH_NM))


class Leg(Enum):
    B_TO_A = "b_to_a"
    A_TO_B = "a_to_b"


@dataclass(slots=True)
class Photon:
    """Carrier tagged with a wavelength, holding one qubit of a register."""

    id: int
    wavelength_nm: float
    register: QuantumRegister
    qubit: int

    def __post_init__(self) -> None:
        if self.wavelength_nm <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength_nm}")
        if not 0 <= self.qubit < self.register.n:
            raise ValueError(f"qubit {self.qubit} out of range for {self.register.n}-qubit register")


@dataclass(slots=True)
class Pulse:
    """Ordered photon collection travelling on one channel leg."""

    leg: Leg
    photons: list[Photon] = field(default_factory=list)

    def __post_init__(self) -> None:
        ids = [p.id for p in self.photons]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate photon ids in pulse: {ids}")


def is_visible(detector: Detector, photon: Photon) -> bool:
    """True iff the photon's wavelength lies inside the detector window."""
    lo, hi = detector.window_nm
    return lo <= photon.wavelength_nm <= hi


def apply_filter(filt: OpticalFilter, pulse: Pulse) -> tuple[Pulse, int]:
    """Transmit in-passband photons (order preserved), absorb the rest.

    Absorbed photons are destroyed: their qubits drop out of play and
    their registers are never consulted again.  Returns the transmitted
    pulse and the absorbed count.
    """
    lo, hi = filt.passband_nm
    passed = [p for p in pulse.photons if lo <= p.wavelength_nm <= hi]
    return Pulse(pulse.leg, passed), len(pulse.photons) - len(passed)


def split_by_wavelength(pulse: Pulse, band_nm: tuple[float, float]) -> tuple[Pulse, Pulse]:
    """Spectroscope: partition a pulse into in-band and out-of-band parts.

    Order is preserved in each part and no photon is created or lost.
    """
    lo, hi = band_nm
    in_band: list[Photon] = []
    out_band: list[Photon] = []
    for p in pulse.photons:
        (in_band if lo <= p.wavelength_nm <= hi else out_band).append(p)
    return Pulse(pulse.leg, in_band), Pulse(pulse.leg, out_band)
