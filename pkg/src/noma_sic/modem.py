"""Gray-coded constellations, ML detection, and per-bit error distances.

Square M-QAM constellations are normalized so the mean symbol energy equals
``Eb * log2(M)`` (unit average energy per bit).  In-phase bits come first in
each label, quadrature bits second; along each axis the amplitude levels
(2l - sqrt(M) + 1) d carry a reflected Gray code so neighbouring points
differ in exactly one bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, DomainError

__all__ = [
    "SUPPORTED_ORDERS",
    "Constellation",
    "ErrorDistanceTable",
    "scaling_factor",
    "build_gray_constellation",
    "mld_detect",
    "error_distance_table",
]

SUPPORTED_ORDERS = (2, 4, 16, 64)


def scaling_factor(m: int, eb: float = 1.0) -> float:
    """Amplitude scale d of the M-QAM lattice.

    For square QAM, d = sqrt(3 Eb log2(M) / (2 (M - 1))).  BPSK is pinned to
    d = sqrt(Eb) so its symbol energy equals Eb; the square-QAM formula does
    not apply at M = 2.
    """
    if m not in SUPPORTED_ORDERS:
        raise DomainError(f"unsupported modulation order {m}")
    if eb <= 0:
        raise DomainError("Eb must be positive")
    if m == 2:
        return math.sqrt(eb)
    return math.sqrt(3.0 * eb * math.log2(m) / (2.0 * (m - 1.0)))


def _gray(n: int) -> int:
    return n ^ (n >> 1)


def _axis_levels(side: int, d: float) -> tuple[np.ndarray, list[int]]:
    """Amplitudes and Gray labels along one axis, most negative level first."""
    amps = np.array([(2 * l - (side - 1)) * d for l in range(side)])
    labels = [_gray(side - 1 - l) for l in range(side)]
    return amps, labels


@dataclass(frozen=True)
class Constellation:
    """Gray-coded constellation with bit labels.

    ``points[i]`` carries label ``labels[i]``, a string of log2(M) bits,
    in-phase bits first.
    """

    order: int
    points: np.ndarray
    labels: tuple[str, ...]
    d: float
    eb: float

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=complex))
        if self.order not in SUPPORTED_ORDERS:
            raise DomainError(f"unsupported modulation order {self.order}")
        if self.points.shape != (self.order,):
            raise DomainError("points length must equal the modulation order")
        if len(set(self.labels)) != self.order:
            raise DomainError("labels must be a bijection onto bit strings")
        energy = float(np.mean(np.abs(self.points) ** 2))
        if abs(energy - self.eb * self.bits_per_symbol) > 1e-12 * max(1.0, energy):
            raise DomainError(
                f"mean symbol energy {energy!r} violates the Eb*log2(M) convention"
            )

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.order))

    def bits_of(self, index: int) -> str:
        return self.labels[index]

    def label_array(self) -> np.ndarray:
        """(M, bits) array of 0/1 for vectorized error counting."""
        return np.array([[int(b) for b in lab] for lab in self.labels], dtype=np.uint8)


def build_gray_constellation(m: int, eb: float = 1.0) -> Constellation:
    """Construct the Gray-coded constellation of order ``m``."""
    if m not in SUPPORTED_ORDERS:
        raise DomainError(f"unsupported modulation order {m}")
    d = scaling_factor(m, eb)
    if m == 2:
        points = np.array([d, -d], dtype=complex)
        labels = ("0", "1")
        return Constellation(order=2, points=points, labels=labels, d=d, eb=eb)
    side = int(round(math.sqrt(m)))
    half_bits = int(math.log2(side))
    amps, axis_labels = _axis_levels(side, d)
    points = []
    labels = []
    for i, (ai, li) in enumerate(zip(amps, axis_labels)):
        for q, (aq, lq) in enumerate(zip(amps, axis_labels)):
            points.append(ai + 1j * aq)
            labels.append(format(li, f"0{half_bits}b") + format(lq, f"0{half_bits}b"))
    return Constellation(order=m, points=np.array(points), labels=tuple(labels), d=d, eb=eb)


def mld_detect(y: complex, h: complex, p: float, constellation: Constellation):
    """Maximum-likelihood detection of one symbol.

    Returns ``(index, bits)`` minimizing |y - sqrt(p) h x|^2 over the
    constellation; exact ties resolve to the lowest symbol index.
    """
    if p <= 0:
        raise DomainError("power coefficient must be positive")
    if h == 0:
        raise DegenerateChannelError("zero channel coefficient")
    metric = np.abs(y - math.sqrt(p) * h * constellation.points) ** 2
    idx = int(np.argmin(metric))
    return idx, constellation.labels[idx]


@dataclass(frozen=True)
class ErrorDistanceTable:
    """Signed Q-term coefficients for the per-bit error distances.

    ``per_bit[j]`` lists (weight, distance coefficient) pairs for in-phase
    bit j, each with its 1/2 symbol-averaging prefactor in
    ``per_bit_prefactor``.  ``ber_terms`` with ``ber_prefactor`` is the
    collapsed combination entering the average BER: each entry (w, c) stands
    for w * Q(c * d * rho + interference).
    """

    order: int
    per_bit_prefactor: float
    per_bit: tuple[tuple[tuple[int, int], ...], ...]
    ber_prefactor: float
    ber_terms: tuple[tuple[int, int], ...]


_TABLES = {
    2: ErrorDistanceTable(
        order=2,
        per_bit_prefactor=1.0,
        per_bit=(((1, 2),),),
        ber_prefactor=1.0,
        ber_terms=((1, 2),),
    ),
    4: ErrorDistanceTable(
        order=4,
        per_bit_prefactor=1.0,
        per_bit=(((1, 2),),),
        ber_prefactor=1.0,
        ber_terms=((1, 2),),
    ),
    16: ErrorDistanceTable(
        order=16,
        per_bit_prefactor=0.5,
        per_bit=(
            ((1, 2), (1, 6)),
            ((2, 2), (1, 6), (-1, 10)),
        ),
        ber_prefactor=0.5,
        ber_terms=((2, 2), (1, 6), (-1, 10)),
    ),
    64: ErrorDistanceTable(
        order=64,
        per_bit_prefactor=0.5,
        per_bit=(
            ((1, 2), (1, 6), (1, 10), (1, 14)),
            ((2, 2), (2, 6), (1, 10), (1, 14), (-1, 18), (-1, 22)),
            ((2, 2), (2, 6), (-1, 10), (-1, 14), (2, 18), (1, 22), (-1, 26)),
        ),
        ber_prefactor=1.0 / 6.0,
        ber_terms=((4, 2), (4, 6), (1, 18), (-1, 26)),
    ),
}


def error_distance_table(m: int) -> ErrorDistanceTable:
    """Q-term coefficient lists for modulation order ``m``.

    The collapsed combinations are, per bit position and after folding the
    subset structure of the b1 distances into b2 (and b3 for M=64):
    M in {2,4}: Q(2d...); M=16: (1/2)[2 Q(2d) + Q(6d) - Q(10d)];
    M=64: (1/6)[4 Q(2d) + 4 Q(6d) + Q(18d) - Q(26d)].
    """
    if m not in _TABLES:
        raise DomainError(f"unsupported modulation order {m}")
    return _TABLES[m]
