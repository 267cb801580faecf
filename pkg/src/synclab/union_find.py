"""Disjoint-set forest with union by size and path compression.

Used to track connectivity while edges are added one at a time, which is
exactly how the random graph process reaches its connectivity hitting time.
"""

import numpy as np


class DisjointSet:
    """Disjoint sets over {0..n-1}.

    The amortized cost of a find/union is O(α(n)); `components` is maintained
    incrementally so connectivity is an O(1) query.
    """

    def __init__(self, n: int):
        self.parents = np.arange(n, dtype=np.int64)
        self.sizes = np.ones(n, dtype=np.int64)
        self.components = n

    def find(self, item: int) -> int:
        parents = self.parents
        root = item
        while parents[root] != root:
            root = parents[root]
        # path compression
        while parents[item] != root:
            parents[item], item = root, parents[item]
        return int(root)

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; True when two components became one."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.sizes[ra] < self.sizes[rb]:
            ra, rb = rb, ra
        self.parents[rb] = ra
        self.sizes[ra] += self.sizes[rb]
        self.components -= 1
        return True

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)
