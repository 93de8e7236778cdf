"""Working precision for extended-precision sign decisions."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

DEFAULT_CAP_BITS = 4096


@dataclass(frozen=True)
class PrecisionContext:
    """Mantissa width plus the margin used to accept a sign.

    A sign of a quantity ``v`` accumulated from terms of magnitude at most
    ``scale`` is trusted only when ``|v| > decision_margin * scale``.
    """

    mantissa_bits: int = 256
    cap_bits: int = DEFAULT_CAP_BITS

    def __post_init__(self):
        if self.mantissa_bits < 53:
            raise ValueError("mantissa_bits must be >= 53")
        if self.cap_bits < self.mantissa_bits:
            raise ValueError("cap_bits below mantissa_bits")

    @property
    def decision_margin(self) -> float:
        return 2.0 ** (-self.mantissa_bits / 4)

    def escalate(self) -> "PrecisionContext":
        """Return the context with doubled mantissa width (clamped to the cap)."""
        return PrecisionContext(min(2 * self.mantissa_bits, self.cap_bits), self.cap_bits)

    @property
    def at_cap(self) -> bool:
        return self.mantissa_bits >= self.cap_bits

    def workprec(self):
        return mpmath.workprec(self.mantissa_bits)

    def decide(self, value, scale) -> int:
        """Sign of ``value`` (+1/-1), 0 if inside the margin.

        A structurally zero quantity (``scale == 0``) also yields 0.
        """
        if scale == 0:
            return 0
        if abs(value) > self.decision_margin * scale:
            return 1 if value > 0 else -1
        return 0


def default_context(n: int) -> PrecisionContext:
    """Default precision by degree: 256 bits up to 200, 1024 above."""
    return PrecisionContext(256 if n <= 200 else 1024)
