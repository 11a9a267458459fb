"""Binary indexed tree over integer ranks, for offline dominance sums."""

from __future__ import annotations


class FenwickTree:
    """Prefix sums of signed integers over positions 0..n-1."""

    __slots__ = ("n", "tree", "_touched")

    def __init__(self, n: int):
        self.n = n
        self.tree = [0] * (n + 1)
        self._touched = []

    def add(self, index: int, delta: int) -> None:
        i = index + 1
        tree = self.tree
        while i <= self.n:
            tree[i] += delta
            self._touched.append(i)
            i += i & (-i)

    def prefix(self, index: int) -> int:
        """Sum of positions 0..index inclusive."""
        i = index + 1
        total = 0
        tree = self.tree
        while i > 0:
            total += tree[i]
            i -= i & (-i)
        return total

    def reset(self) -> None:
        """Clear only the touched slots; cheap between divide-and-conquer passes."""
        tree = self.tree
        for i in self._touched:
            tree[i] = 0
        self._touched.clear()
