"""Repeat-accumulate encoding: repetition degrees, grouped interleaver, accumulator.

The encoder repeats info bit t exactly q_t times, scatters the copies to the
accumulator input positions listed in group X_t, and runs the rate-1
accumulator over the result.  A final termination input returns the
accumulator to the zero state; its output bit is always 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DegreeDistribution:
    """Repetition degree q_t of each of the k info bits."""

    degrees: tuple[int, ...]

    def __post_init__(self):
        degrees = tuple(int(q) for q in self.degrees)
        if not degrees:
            raise ValueError("need at least one info bit")
        if any(q < 2 for q in degrees):
            raise ValueError("all repetition degrees must be >= 2")
        object.__setattr__(self, "degrees", degrees)

    @classmethod
    def regular(cls, q: int, k: int) -> "DegreeDistribution":
        return cls((int(q),) * int(k))

    @property
    def k(self) -> int:
        return len(self.degrees)

    @property
    def n(self) -> int:
        return sum(self.degrees)

    @property
    def is_regular(self) -> bool:
        return len(set(self.degrees)) == 1

    @property
    def all_even(self) -> bool:
        # Required by the analytic bounds, not by the encoder itself.
        return all(q % 2 == 0 for q in self.degrees)

    @property
    def q_max(self) -> int:
        return max(self.degrees)


@dataclass(frozen=True)
class GroupedInterleaver:
    """Partition of accumulator input positions {1..n} into groups X_1..X_k.

    Group t holds the positions carrying copies of info bit t.  Positions are
    1-based and each group is stored sorted ascending.
    """

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(sorted(int(i) for i in grp)) for grp in self.groups)
        object.__setattr__(self, "groups", groups)
        n = sum(len(grp) for grp in groups)
        seen = set()
        for grp in groups:
            if not grp:
                raise ValueError("empty interleaver group")
            seen.update(grp)
        if seen != set(range(1, n + 1)):
            raise ValueError("interleaver groups must partition 1..n exactly")

    @classmethod
    def consecutive(cls, dd: DegreeDistribution) -> "GroupedInterleaver":
        """The trivial interleaver: group t takes the next q_t positions."""
        groups, pos = [], 1
        for q in dd.degrees:
            groups.append(tuple(range(pos, pos + q)))
            pos += q
        return cls(tuple(groups))

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def n(self) -> int:
        return sum(len(grp) for grp in self.groups)

    @property
    def degrees(self) -> DegreeDistribution:
        return DegreeDistribution(tuple(len(grp) for grp in self.groups))

    def group_of(self) -> np.ndarray:
        """Array mapping position (1-based) -> group index (0-based); slot 0 unused."""
        out = np.full(self.n + 1, -1, dtype=int)
        for t, grp in enumerate(self.groups):
            for i in grp:
                out[i] = t
        return out


@dataclass(eq=False)
class Codeword:
    """An encoded block: n accumulator outputs plus the termination input."""

    bits: np.ndarray
    info: np.ndarray
    termination_input: int

    @property
    def n(self) -> int:
        return len(self.bits)

    def transmitted(self) -> np.ndarray:
        """Bits on the channel: the n outputs plus the termination output (always 0)."""
        return np.append(self.bits, 0).astype(np.int8)


def accumulate(stream) -> np.ndarray:
    """Rate-1 accumulator: output i is the mod-2 sum of inputs 1..i."""
    stream = np.asarray(stream, dtype=np.int64)
    if stream.size == 0:
        raise ValueError("empty accumulator input")
    return np.bitwise_and(np.cumsum(stream), 1).astype(np.int8)


def encode(info, dd: DegreeDistribution, il: GroupedInterleaver) -> Codeword:
    """Encode k info bits into an RA codeword using the given interleaver.

    Copies of bit t fill the positions of X_t in ascending order (any order
    within the group yields the same code; fixing it makes encoding
    deterministic).
    """
    info = np.asarray(info, dtype=np.int8)
    if len(info) != dd.k:
        raise ValueError(f"expected {dd.k} info bits, got {len(info)}")
    if il.degrees.degrees != dd.degrees:
        raise ValueError("interleaver group sizes do not match the degree distribution")
    stream = np.zeros(dd.n, dtype=np.int8)
    for t, grp in enumerate(il.groups):
        for i in grp:
            stream[i - 1] = info[t]
    bits = accumulate(stream)
    return Codeword(bits=bits, info=info.copy(), termination_input=int(bits[-1]))
