"""Eavesdropping strategies as per-leg pulse hooks plus a per-round guess.

A strategy receives every pulse travelling on a channel leg and may add
or remove photons, but must never touch the register of a photon it did
not create.  ``finalize`` is called exactly once per round and returns
the strategy's guess of the encoded bits, or ``None`` for strategies
that never guess.  All per-round mutable state lives on the
:class:`RoundContext`, so one strategy instance can serve concurrently
executing rounds.

When a guessing strategy cannot recover its probe (control round, or
probe absorbed by the receiver's filter) it emits a uniformly random
guess and flags the round as blind, keeping the accuracy statistic
well-defined while recording that the attack was neutralized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from . import quantum
from .optics import EVE_WAVELENGTH_NM, Photon, Pulse, split_by_wavelength
from .quantum import BASIS_X, BASIS_Z, BellKind, Prep, QuantumRegister

# Half-width of the spectroscope band Eve uses to pick out her probe.
# Any band separating the probe wavelength from the signal works; fixed
# for determinism.
PROBE_BAND_HALF_WIDTH_NM = 1.0

# Bell outcome -> two-bit value (high bit = phase flip, low bit = bit flip).
DENSE_DECODE: dict[BellKind, int] = {
    BellKind.PSI_PLUS: 0b00,
    BellKind.PHI_PLUS: 0b01,
    BellKind.PSI_MINUS: 0b10,
    BellKind.PHI_MINUS: 0b11,
}


@dataclass(slots=True)
class RoundContext:
    """Per-round scratchpad shared between the protocol engine and a strategy."""

    rng: np.random.Generator
    blind: bool = False
    kkkp_theta: float | None = None
    scratch: dict[str, Any] = field(default_factory=dict)
    _next_id: int = 0

    def new_photon_id(self) -> int:
        pid = self._next_id
        self._next_id += 1
        return pid


class AdversaryStrategy:
    """Base strategy: identity hooks, no guess."""

    def on_b_to_a(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        return pulse

    def on_a_to_b(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        return pulse

    def on_a_to_b_leg3(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        return pulse

    def finalize(self, ctx: RoundContext) -> int | None:
        return None


def make_no_eve() -> AdversaryStrategy:
    return AdversaryStrategy()


def _probe_band(lambda_e_nm: float) -> tuple[float, float]:
    return (lambda_e_nm - PROBE_BAND_HALF_WIDTH_NM, lambda_e_nm + PROBE_BAND_HALF_WIDTH_NM)


def _take_probes(pulse: Pulse, lambda_e_nm: float, probe_ids: set[int]) -> tuple[list[Photon], Pulse]:
    """Split off Eve's own probes via the spectroscope band.

    In-band photons that are not hers (possible when the probe
    wavelength is chosen inside the legitimate band) are forwarded
    untouched, order preserved.
    """
    in_band, _ = split_by_wavelength(pulse, _probe_band(lambda_e_nm))
    captured = [p for p in in_band.photons if p.id in probe_ids]
    captured_ids = {p.id for p in captured}
    forwarded = [p for p in pulse.photons if p.id not in captured_ids]
    return captured, Pulse(pulse.leg, forwarded)


class _InvisiblePhotonEavesdropper(AdversaryStrategy):
    """Adds a |+> probe on B->A, reads the encoding off it on A->B.

    The probe rides through the encoder alongside the travel photon, so
    a phase-flip encoding maps it to |-> and an X measurement after the
    spectroscope reveals the encoded bit without ever touching the
    legitimate photon.
    """

    def __init__(self, lambda_e_nm: float):
        if lambda_e_nm <= 0:
            raise ValueError(f"probe wavelength must be positive, got {lambda_e_nm}")
        self.lambda_e_nm = lambda_e_nm

    def on_b_to_a(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        probe = Photon(ctx.new_photon_id(), self.lambda_e_nm, quantum.make_single(Prep.PLUS), 0)
        ctx.scratch["probe_id"] = probe.id
        return Pulse(pulse.leg, pulse.photons + [probe])

    def on_a_to_b(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        probe_id = ctx.scratch.get("probe_id")
        if probe_id is None:  # no probe in flight yet on this round
            return pulse
        captured, forwarded = _take_probes(pulse, self.lambda_e_nm, {probe_id})
        if captured:
            probe = captured[0]
            outcome, _ = quantum.measure(probe.register, probe.qubit, BASIS_X, ctx.rng)
            ctx.scratch["readout"] = outcome
        return forwarded

    def finalize(self, ctx: RoundContext) -> int | None:
        readout = ctx.scratch.get("readout")
        if readout is None:
            ctx.blind = True
            return int(ctx.rng.integers(0, 2))
        return readout


def make_ipe(lambda_e_nm: float = EVE_WAVELENGTH_NM) -> AdversaryStrategy:
    """Invisible-photon eavesdropper for the one-bit ping-pong variants."""
    return _InvisiblePhotonEavesdropper(lambda_e_nm)


class _DenseInvisiblePhotonEavesdropper(AdversaryStrategy):
    """Entangled-pair probe for the dense-coding variant.

    Eve stores one half of a fresh |Psi+> pair and sends the other half
    through the encoder; a Bell measurement of the returned pair reads
    out both encoded bits.
    """

    def __init__(self, lambda_e_nm: float):
        if lambda_e_nm <= 0:
            raise ValueError(f"probe wavelength must be positive, got {lambda_e_nm}")
        self.lambda_e_nm = lambda_e_nm

    def on_b_to_a(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        pair = quantum.make_bell(BellKind.PSI_PLUS)
        probe = Photon(ctx.new_photon_id(), self.lambda_e_nm, pair, 1)
        ctx.scratch["probe_id"] = probe.id
        ctx.scratch["pair"] = pair  # qubit 0 stays in Eve's lab
        return Pulse(pulse.leg, pulse.photons + [probe])

    def on_a_to_b(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        probe_id = ctx.scratch.get("probe_id")
        if probe_id is None:
            return pulse
        captured, forwarded = _take_probes(pulse, self.lambda_e_nm, {probe_id})
        if captured:
            probe = captured[0]
            pair: QuantumRegister = ctx.scratch["pair"]
            if probe.register is pair:
                reg, qa, qb = pair, 0, probe.qubit
            else:  # probe was rehoused; bring both halves into one register
                reg = quantum.merge_registers(pair, probe.register)
                qa, qb = 0, pair.n + probe.qubit
            kind, _ = quantum.measure_bell(reg, qa, qb, ctx.rng)
            ctx.scratch["readout"] = DENSE_DECODE[kind]
        return forwarded

    def finalize(self, ctx: RoundContext) -> int | None:
        readout = ctx.scratch.get("readout")
        if readout is None:
            ctx.blind = True
            return int(ctx.rng.integers(0, 4))
        return readout


def make_ipe_dense(lambda_e_nm: float = EVE_WAVELENGTH_NM) -> AdversaryStrategy:
    """Invisible entangled-pair eavesdropper for the dense-coding variant."""
    return _DenseInvisiblePhotonEavesdropper(lambda_e_nm)


class _InterceptResend(AdversaryStrategy):
    """Textbook baseline: measure the outbound signal, forward the collapse.

    Measures every photon of the B->A pulse in a fixed basis and never
    guesses a message bit (the measurement happens before the encoding).
    """

    def __init__(self, basis: np.ndarray):
        self.basis = basis

    def on_b_to_a(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        for p in pulse.photons:
            quantum.measure(p.register, p.qubit, self.basis, ctx.rng)
        return pulse


def make_intercept_resend(basis: np.ndarray = BASIS_Z) -> AdversaryStrategy:
    return _InterceptResend(basis)


class _BlindBaseProbe(AdversaryStrategy):
    """n-photon probe against the three-way blind-rotation protocol.

    Probes injected after the receiver's blinding rotation pick up only
    the sender's net encoding rotation ROT(s*pi/4 - theta).  Without
    theta the probe readout distribution is independent of s; with
    side knowledge of theta each probe discriminates the two encodings
    exactly.
    """

    def __init__(self, n: int, lambda_e_nm: float, theta_known: bool):
        if n < 1:
            raise ValueError(f"probe photon count must be >= 1, got {n}")
        if lambda_e_nm <= 0:
            raise ValueError(f"probe wavelength must be positive, got {lambda_e_nm}")
        self.n = n
        self.lambda_e_nm = lambda_e_nm
        self.theta_known = theta_known

    def on_b_to_a(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        probes = [
            Photon(ctx.new_photon_id(), self.lambda_e_nm, quantum.make_single(0.0), 0)
            for _ in range(self.n)
        ]
        ctx.scratch["probe_ids"] = {p.id for p in probes}
        return Pulse(pulse.leg, pulse.photons + probes)

    def on_a_to_b_leg3(self, pulse: Pulse, ctx: RoundContext) -> Pulse:
        captured, forwarded = _take_probes(pulse, self.lambda_e_nm, ctx.scratch["probe_ids"])
        ctx.scratch["captured"] = captured
        return forwarded

    def finalize(self, ctx: RoundContext) -> int | None:
        captured: list[Photon] = ctx.scratch.get("captured", [])
        if not captured:
            ctx.blind = True
            return int(ctx.rng.integers(0, 2))
        zeros = 0
        if self.theta_known:
            unwind = quantum.rot(ctx.kkkp_theta)
            for p in captured:
                quantum.apply_unitary(p.register, p.qubit, unwind)
                outcome, _ = quantum.measure(p.register, p.qubit, BASIS_X, ctx.rng)
                zeros += 1 - outcome
        else:
            for p in captured:
                outcome, _ = quantum.measure(p.register, p.qubit, BASIS_Z, ctx.rng)
                zeros += 1 - outcome
        # Majority vote over the probe readouts; fair coin on a tie.
        half = len(captured) / 2.0
        if zeros > half:
            return 0
        if zeros < half:
            return 1
        return int(ctx.rng.integers(0, 2))


def make_kkkp_probe(
    n: int, lambda_e_nm: float = EVE_WAVELENGTH_NM, theta_known: bool = False
) -> AdversaryStrategy:
    """Probe attack on the blind-rotation protocol.

    ``theta_known`` grants per-round oracle access to the sender's
    blinding angle (the protocol draws a fresh angle every round, so the
    knowledge is modelled as a flag rather than a constant).
    """
    return _BlindBaseProbe(n, lambda_e_nm, theta_known)


class StrategyKind(Enum):
    NO_EVE = "no_eve"
    IPE = "ipe"
    IPE_DENSE = "ipe_dense"
    INTERCEPT_RESEND = "intercept_resend"
    KKKP_PROBE = "kkkp_probe"


@dataclass(frozen=True)
class StrategySpec:
    """Declarative strategy description used by the session runner and CLI.

    ``basis`` is "z", "x", or a rotation angle in radians.
    """

    kind: StrategyKind
    lambda_e_nm: float = EVE_WAVELENGTH_NM
    basis: str | float = "z"
    n: int = 1
    theta_known: bool = False

    def validate(self) -> None:
        if self.lambda_e_nm <= 0:
            raise ValueError(f"attack lambda_e_nm must be positive, got {self.lambda_e_nm}")
        if self.n < 1:
            raise ValueError(f"attack n must be >= 1, got {self.n}")
        parse_basis(self.basis)


def parse_basis(basis: str | float) -> np.ndarray:
    if isinstance(basis, str):
        name = basis.lower()
        if name == "z":
            return BASIS_Z
        if name == "x":
            return BASIS_X
        raise ValueError(f"unknown measurement basis {basis!r} (want 'z', 'x' or radians)")
    return quantum.rotated_basis(float(basis))


def make_strategy(spec: StrategySpec) -> AdversaryStrategy:
    """Instantiate the strategy described by ``spec``."""
    spec.validate()
    if spec.kind is StrategyKind.NO_EVE:
        return make_no_eve()
    if spec.kind is StrategyKind.IPE:
        return make_ipe(spec.lambda_e_nm)
    if spec.kind is StrategyKind.IPE_DENSE:
        return make_ipe_dense(spec.lambda_e_nm)
    if spec.kind is StrategyKind.INTERCEPT_RESEND:
        return make_intercept_resend(parse_basis(spec.basis))
    return make_kkkp_probe(spec.n, spec.lambda_e_nm, spec.theta_known)
