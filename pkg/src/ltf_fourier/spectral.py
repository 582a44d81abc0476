"""Exact Fourier analysis of Boolean functions on the hypercube {+1,-1}^n.

Encoding conventions shared by the whole package:

* Truth tables are bit-packed little-endian within bytes: bit ``k % 8`` of
  byte ``k // 8`` holds table entry ``k``, and a set bit means f(x) = +1.
* Table index ``k`` encodes the input point via ``x_i = +1`` iff bit
  ``i - 1`` of ``k`` is set (variables are numbered 1..n).
* A subset mask ``S`` uses the same layout: bit ``i - 1`` set iff variable
  ``i`` belongs to the subset.
* Fourier coefficients are stored normalized (divided by 2^n), so Parseval
  for a +/-1-valued function reads "sum of squared coefficients = 1".
* Entropies are reported in bits (log base 2).  Readers working in nats
  rescale by ln 2; no other constant in the package depends on the base.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_MAX = 20
PARSEVAL_TOL = 1e-9


def popcounts(n: int) -> np.ndarray:
    """Popcount of every mask in [0, 2^n), as uint8."""
    if not 0 <= n <= N_MAX:
        raise ValueError(f"n must be in [0, {N_MAX}], got {n}")
    out = np.zeros(1 << n, dtype=np.uint8)
    h = 1
    while h < out.size:
        out[h : 2 * h] = out[:h] + 1
        h *= 2
    return out


def fwht_inplace(a: np.ndarray) -> np.ndarray:
    """Unnormalized in-place Walsh-Hadamard butterfly.

    Self-inverse up to scaling: applying it twice multiplies the input by
    ``len(a)``.  The array length must be a power of two.
    """
    size = a.size
    if size == 0 or size & (size - 1):
        raise ValueError("array length must be a positive power of two")
    h = 1
    while h < size:
        v = a.reshape(-1, 2 * h)
        left = v[:, :h].copy()
        right = v[:, h:]
        v[:, :h] = left + right
        v[:, h:] = left - right
        h *= 2
    return a


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """Bit-packed truth table of a function {+1,-1}^arity -> {+1,-1}."""

    arity: int
    packed: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.arity, (int, np.integer)) or not 1 <= self.arity <= N_MAX:
            raise ValueError(f"arity must be an integer in [1, {N_MAX}], got {self.arity}")
        packed = np.ascontiguousarray(self.packed, dtype=np.uint8)
        expected = ((1 << self.arity) + 7) // 8
        if packed.shape != (expected,):
            raise ValueError(f"packed table must have {expected} bytes, got shape {packed.shape}")
        # padding bits past the table must be zero so equality can compare bytes
        tail = np.unpackbits(packed[-1:], bitorder="little")
        used = (1 << self.arity) - 8 * (expected - 1)
        if used < 8 and tail[used:].any():
            raise ValueError("padding bits past the table end must be zero")
        packed.flags.writeable = False
        object.__setattr__(self, "packed", packed)
        object.__setattr__(self, "arity", int(self.arity))

    @property
    def size(self) -> int:
        return 1 << self.arity

    def bits(self) -> np.ndarray:
        """Truth table as 0/1 uint8 values, index order as documented."""
        return np.unpackbits(self.packed, count=self.size, bitorder="little")

    def signs(self) -> np.ndarray:
        """Truth table as +/-1.0 float64 values."""
        return 2.0 * self.bits() - 1.0

    def to_hex(self) -> str:
        return self.packed.tobytes().hex()

    @classmethod
    def from_hex(cls, arity: int, hex_table: str) -> "BooleanFunction":
        try:
            raw = bytes.fromhex(hex_table)
        except ValueError as exc:
            raise ValueError(f"invalid hex truth table: {exc}") from exc
        return cls(arity, np.frombuffer(raw, dtype=np.uint8).copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.arity == other.arity and self.packed.tobytes() == other.packed.tobytes()

    def __hash__(self) -> int:
        return hash((self.arity, self.packed.tobytes()))

    def __repr__(self) -> str:
        return f"BooleanFunction(arity={self.arity}, packed=0x{self.to_hex()})"


def from_truth_values(arity: int, values) -> BooleanFunction:
    """Build a BooleanFunction from an explicit +/-1 table of length 2^arity."""
    if not isinstance(arity, (int, np.integer)) or not 1 <= arity <= N_MAX:
        raise ValueError(f"arity must be an integer in [1, {N_MAX}], got {arity}")
    arr = np.asarray(values)
    if arr.shape != (1 << arity,):
        raise ValueError(f"expected {1 << arity} truth values, got shape {arr.shape}")
    if not np.isin(arr, (-1, 1)).all():
        raise ValueError("truth values must all be +1 or -1")
    packed = np.packbits(arr > 0, bitorder="little")
    return BooleanFunction(int(arity), packed)


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Normalized Fourier coefficients indexed by subset mask."""

    arity: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.arity <= N_MAX:
            raise ValueError(f"arity must be in [1, {N_MAX}], got {self.arity}")
        coeffs = np.ascontiguousarray(self.coeffs, dtype=np.float64)
        if coeffs.shape != (1 << self.arity,):
            raise ValueError(f"expected {1 << self.arity} coefficients, got shape {coeffs.shape}")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "arity", int(self.arity))

    def parseval_defect(self) -> float:
        """|sum of squared coefficients - 1|."""
        return abs(float(np.sum(self.coeffs * self.coeffs)) - 1.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FourierSpectrum):
            return NotImplemented
        return self.arity == other.arity and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.arity, self.coeffs.tobytes()))


def wht(f: BooleanFunction) -> FourierSpectrum:
    """Full Fourier transform of a truth table.

    The plain butterfly treats a set index bit as the second half of each
    block, while the input encoding puts x_i = +1 there; characters are
    products of x_i, so every odd-size subset picks up a sign flip relative
    to the plain transform.
    """
    a = f.signs()
    fwht_inplace(a)
    parity = popcounts(f.arity) & 1
    a *= 1.0 - 2.0 * parity
    a /= f.size
    return FourierSpectrum(f.arity, a)


def _checked_squares(s: FourierSpectrum, tol: float) -> np.ndarray:
    sq = s.coeffs * s.coeffs
    defect = abs(float(sq.sum()) - 1.0)
    if defect > tol:
        raise ValueError(f"spectrum violates Parseval: defect {defect:.3e} exceeds {tol:.1e}")
    return sq


def entropy(s: FourierSpectrum, tol: float = PARSEVAL_TOL) -> float:
    """Shannon entropy in bits of the squared-coefficient distribution."""
    sq = _checked_squares(s, tol)
    nz = sq[sq > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def min_entropy(s: FourierSpectrum, tol: float = PARSEVAL_TOL) -> float:
    """-log2 of the largest squared coefficient."""
    sq = _checked_squares(s, tol)
    top = float(sq.max())
    if top == 0.0:
        raise ValueError("all-zero spectrum has no min-entropy")
    return float(-np.log2(top))


def influence_spectral(s: FourierSpectrum) -> float:
    """Total influence as the subset-size-weighted spectral mass."""
    sq = s.coeffs * s.coeffs
    return float(np.sum(popcounts(s.arity) * sq))


def influence_combinatorial(f: BooleanFunction) -> tuple[float, np.ndarray]:
    """Total and per-coordinate influence by counting sign flips.

    Returns ``(total, per_coordinate)`` where ``per_coordinate[i - 1]`` is
    the probability that flipping x_i changes f on a uniform input.
    """
    b = f.bits()
    n = f.arity
    per = np.empty(n, dtype=np.float64)
    for i in range(1, n + 1):
        h = 1 << (i - 1)
        v = b.reshape(-1, 2 * h)
        flips = int(np.count_nonzero(v[:, :h] != v[:, h:]))
        per[i - 1] = flips * 2.0 / f.size
    return float(per.sum()), per
