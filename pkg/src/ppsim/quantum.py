"""Pure-state simulation of 1..8 polarization qubits.

A register holds the joint state of ``n`` qubits as a complex amplitude
vector of length ``2**n``.  Basis index convention: qubit 0 is the most
significant bit, so for two qubits the amplitudes are ordered
|00>, |01>, |10>, |11>.

Single-qubit unitaries and measurement bases are plain 2x2 complex
arrays.  A measurement basis matrix has the outcome-0 eigenvector in
column 0 and the outcome-1 eigenvector in column 1; the Z basis is the
identity and the rotated basis ROT(theta) doubles as its own basis
matrix.  All randomness enters through an explicitly passed
``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

MAX_QUBITS = 8

_SQRT2_INV = 1.0 / math.sqrt(2.0)

# Single-qubit gates.  ZX is "apply X, then Z"; IY = i*Y is the real
# matrix that flips a qubit in both the Z and the X basis.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
ZX = Z @ X
IY = np.array([[0, 1], [-1, 0]], dtype=complex)


def rot(theta: float) -> np.ndarray:
    """Polarization rotation [[cos t, -sin t], [sin t, cos t]] on {|0>, |1>}."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


# Measurement bases (columns = outcome eigenvectors).
BASIS_Z = np.eye(2, dtype=complex)
BASIS_X = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV


def rotated_basis(theta: float) -> np.ndarray:
    """Projective basis {ROT(theta)|0>, ROT(theta)|1>}."""
    return rot(theta)


class BellKind(Enum):
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"
    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"


_BELL_ORDER = (BellKind.PSI_PLUS, BellKind.PSI_MINUS, BellKind.PHI_PLUS, BellKind.PHI_MINUS)

BELL_AMPLITUDES: dict[BellKind, np.ndarray] = {
    BellKind.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _SQRT2_INV,
    BellKind.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) * _SQRT2_INV,
    BellKind.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _SQRT2_INV,
    BellKind.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _SQRT2_INV,
}

# Rows = Bell amplitudes in _BELL_ORDER; used to project onto the Bell basis.
_BELL_MATRIX = np.stack([BELL_AMPLITUDES[k] for k in _BELL_ORDER])


class Prep(Enum):
    """Named single-qubit preparations."""

    ZERO = "zero"
    ONE = "one"
    PLUS = "plus"
    MINUS = "minus"


_PREP_AMPLITUDES: dict[Prep, np.ndarray] = {
    Prep.ZERO: np.array([1, 0], dtype=complex),
    Prep.ONE: np.array([0, 1], dtype=complex),
    Prep.PLUS: np.array([1, 1], dtype=complex) * _SQRT2_INV,
    Prep.MINUS: np.array([1, -1], dtype=complex) * _SQRT2_INV,
}


class QuantumRegister:
    """Joint pure state of ``n`` qubits; amplitudes has length ``2**n``."""

    __slots__ = ("amplitudes", "n")

    def __init__(self, amplitudes: np.ndarray, n: int):
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} amplitudes for {n} qubits, got {amplitudes.shape}")
        self.amplitudes = amplitudes
        self.n = n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"QuantumRegister(n={self.n}, amplitudes={self.amplitudes!r})"


def states_equal(a: QuantumRegister, b: QuantumRegister, tol: float = 1e-10) -> bool:
    """Equality modulo global phase: |<a|b>| == 1 within tol."""
    if a.n != b.n:
        return False
    return abs(abs(np.vdot(a.amplitudes, b.amplitudes)) - 1.0) <= tol


def make_bell(kind: BellKind) -> QuantumRegister:
    """Fresh 2-qubit register in the requested Bell state."""
    return QuantumRegister(BELL_AMPLITUDES[kind].copy(), 2)


def make_single(spec: Prep | float) -> QuantumRegister:
    """Fresh 1-qubit register.

    ``spec`` is either a named preparation or a polarization angle in
    radians, yielding ROT(angle)|0> = (cos, sin).
    """
    if isinstance(spec, Prep):
        return QuantumRegister(_PREP_AMPLITUDES[spec].copy(), 1)
    theta = float(spec)
    return QuantumRegister(np.array([math.cos(theta), math.sin(theta)], dtype=complex), 1)


def _check_index(reg: QuantumRegister, qubit: int) -> None:
    if not 0 <= qubit < reg.n:
        raise IndexError(f"qubit {qubit} out of range for {reg.n}-qubit register")


def apply_unitary(reg: QuantumRegister, qubit: int, u: np.ndarray) -> QuantumRegister:
    """Apply a 2x2 unitary to one qubit.  Mutates and returns ``reg``."""
    _check_index(reg, qubit)
    if reg.n == 1:
        reg.amplitudes = u @ reg.amplitudes
        return reg
    psi = reg.amplitudes.reshape([2] * reg.n)
    psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [qubit])), 0, qubit)
    reg.amplitudes = np.ascontiguousarray(psi).reshape(-1)
    return reg


def measure(
    reg: QuantumRegister, qubit: int, basis: np.ndarray, rng: np.random.Generator
) -> tuple[int, QuantumRegister]:
    """Projective measurement of one qubit in the given basis.

    Samples the outcome by the Born rule, collapses the register in
    place (the qubit stays, collapsed onto the outcome eigenvector) and
    returns ``(outcome, reg)``.
    """
    _check_index(reg, qubit)
    in_z = basis is BASIS_Z
    if not in_z:
        apply_unitary(reg, qubit, basis.conj().T)
    if reg.n == 1:
        amps = reg.amplitudes
        c = complex(amps[1])
        p1 = c.real * c.real + c.imag * c.imag
        outcome = 1 if rng.random() < p1 else 0
        kept = complex(amps[outcome])
        amps[1 - outcome] = 0.0
        amps[outcome] = kept / math.sqrt(p1 if outcome else 1.0 - p1)
    else:
        psi = reg.amplitudes.reshape([2] * reg.n)
        sel = [slice(None)] * reg.n
        sel[qubit] = 1
        p1 = float(np.sum(np.abs(psi[tuple(sel)]) ** 2))
        outcome = 1 if rng.random() < p1 else 0
        sel[qubit] = 1 - outcome
        psi[tuple(sel)] = 0.0
        reg.amplitudes /= math.sqrt(p1 if outcome else 1.0 - p1)
    if not in_z:
        apply_unitary(reg, qubit, basis)
    return outcome, reg


def measure_bell(
    reg: QuantumRegister, qa: int, qb: int, rng: np.random.Generator
) -> tuple[BellKind, QuantumRegister]:
    """Projective measurement of qubits (qa, qb) in the Bell basis.

    Both qubits must live in ``reg``; entangled partners held in another
    register must be brought in with :func:`merge_registers` first.
    Collapses in place and returns ``(outcome kind, reg)``.
    """
    _check_index(reg, qa)
    _check_index(reg, qb)
    if qa == qb:
        raise ValueError("Bell measurement needs two distinct qubits")
    n = reg.n
    psi = reg.amplitudes.reshape([2] * n)
    psi = np.moveaxis(psi, (qa, qb), (0, 1)).reshape(4, -1)
    coeff = _BELL_MATRIX.conj() @ psi  # row k = <bell_k| psi, over the remaining qubits
    probs = np.sum(np.abs(coeff) ** 2, axis=1)
    r = rng.random()
    acc = 0.0
    k = -1
    for i, p in enumerate(probs):
        acc += float(p)
        if r < acc:
            k = i
            break
    if k < 0:  # cumulative sum fell short of 1 by rounding
        k = int(np.argmax(probs))
    post = np.outer(_BELL_MATRIX[k], coeff[k] / math.sqrt(float(probs[k])))
    post = np.moveaxis(post.reshape([2, 2] + [2] * (n - 2)), (0, 1), (qa, qb))
    reg.amplitudes = np.ascontiguousarray(post).reshape(-1)
    return _BELL_ORDER[k], reg


def merge_registers(r1: QuantumRegister, r2: QuantumRegister) -> QuantumRegister:
    """Tensor product register; r2's qubit indices shift up by ``r1.n``."""
    n = r1.n + r2.n
    if n > MAX_QUBITS:
        raise ValueError(f"merged register would hold {n} qubits (cap {MAX_QUBITS})")
    return QuantumRegister(np.kron(r1.amplitudes, r2.amplitudes), n)
