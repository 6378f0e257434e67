"""
Arithmetic in the prime field of order 2^61 - 1 and the embedding of signed
ledger amounts into it.
"""

from dataclasses import dataclass

from ..errors import TripleEntryError

P = 2**61 - 1


class MagnitudeTooLarge(TripleEntryError):
    """Raised when an amount is too large to embed without wrap-around."""

    pass


class NotInField(TripleEntryError):
    """Raised when a field element is built from a value outside [0, P)."""

    pass


@dataclass(frozen=True)
class FieldElement:
    value: int

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise NotInField(f"field value must be an integer, got {self.value!r}")
        if not 0 <= self.value < P:
            raise NotInField(f"field value {self.value} outside [0, {P})")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement((self.value + other.value) % P)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement((self.value - other.value) % P)

    def __neg__(self) -> "FieldElement":
        return FieldElement((-self.value) % P)

    @classmethod
    def zero(cls) -> "FieldElement":
        return cls(0)


def field_sum(elements) -> FieldElement:
    return FieldElement(sum(e.value for e in elements) % P)


def encode_amount(minor_units: int) -> FieldElement:
    """
    Embed a signed amount: x >= 0 maps to x, x < 0 to P - |x|.

    Raises:
        MagnitudeTooLarge: Unless |minor_units| < P / 4.
    """
    if 4 * abs(minor_units) >= P:
        raise MagnitudeTooLarge(f"|{minor_units}| is not below P/4")
    return FieldElement(minor_units % P)


def decode_amount(element: FieldElement) -> int:
    """Inverse of encode_amount; values above P/2 decode as negatives."""
    return element.value - P if element.value > P // 2 else element.value
