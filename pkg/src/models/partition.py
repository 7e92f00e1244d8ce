"""Non-crossing partition data model."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Tuple

from src.utils.errors import DomainError

Block = Tuple[int, ...]


def crosses(blocks: Iterable[Iterable[int]]) -> bool:
    """True when two blocks cross (a < b < c < d with a, c in one block and b, d in the other)."""
    blocks = [sorted(b) for b in blocks]
    for left, right in combinations(blocks, 2):
        for a, c in combinations(left, 2):
            inside = [x for x in right if a < x < c]
            if inside and len(inside) < len(right):
                return True
    return False


@dataclass(frozen=True)
class NCPartition:
    """
    A non-crossing partition of {1, ..., n}.

    Blocks are stored in canonical order: sorted by their minimum, each block
    ascending. Use :meth:`of` to build one from arbitrary block lists.
    """

    n: int
    blocks: Tuple[Block, ...]

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("partitions are defined for n >= 1")
        seen = sorted(x for block in self.blocks for x in block)
        if seen != list(range(1, self.n + 1)):
            raise DomainError(f"blocks {self.blocks} do not partition 1..{self.n}")
        if any(not block for block in self.blocks):
            raise DomainError("empty block")
        canonical = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        if canonical != self.blocks:
            raise DomainError("blocks are not in canonical order; use NCPartition.of")
        if crosses(self.blocks):
            raise DomainError(f"blocks {self.blocks} cross")

    @classmethod
    def of(cls, n: int, blocks: Iterable[Iterable[int]]) -> "NCPartition":
        """Build a partition, putting the blocks into canonical order first."""
        canonical = tuple(sorted(tuple(sorted(b)) for b in blocks))
        return cls(n, canonical)

    @classmethod
    def bottom(cls, n: int) -> "NCPartition":
        """The finest partition 0_n (all singletons)."""
        return cls(n, tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def top(cls, n: int) -> "NCPartition":
        """The coarsest partition 1_n (one block)."""
        return cls(n, (tuple(range(1, n + 1)),))

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def size_type(self) -> Tuple[int, ...]:
        """Block sizes as a sorted multiset."""
        return tuple(sorted(self.block_sizes))

    def is_finest(self) -> bool:
        return len(self.blocks) == self.n

    def is_coarsest(self) -> bool:
        return len(self.blocks) == 1

    def block_of(self, element: int) -> Block:
        for block in self.blocks:
            if element in block:
                return block
        raise DomainError(f"{element} is not in 1..{self.n}")

    def to_dict(self) -> dict:
        return {"n": self.n, "blocks": [list(b) for b in self.blocks]}

    def __str__(self) -> str:
        inner = "|".join(",".join(map(str, b)) for b in self.blocks)
        return f"{{{inner}}}"
