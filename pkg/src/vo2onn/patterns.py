"""3x3 binary patterns, their current encoding, and symmetry classes.

A pattern is indexed by n in 0..511: the nine cells x_1..x_9 (row-major
over the grid) read as a binary number with x_1 the most significant bit,
so n = 489 is (1,1,1,1,0,1,0,0,1). Cell k maps onto grid oscillator k,
and a pattern selects the nine feed currents: i_on where the cell is
filled, i_off where it is empty.

The 512 patterns fall into 102 orbits under the symmetry group of the
square (4 rotations and 4 reflections). Orbits are numbered 1..102 sorted
by (fill count, smallest member index), which puts the empty grid first
and the full grid last. Since the network topology is invariant under
these transforms, one simulation of the orbit representative stands for
the whole class.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_CELLS = 9
N_PATTERNS = 512
N_CLASSES = 102


def _build_transforms() -> tuple[tuple[int, ...], ...]:
    grid = np.arange(N_CELLS).reshape(3, 3)
    perms = []
    for k in range(4):
        rot = np.rot90(grid, k)
        for g in (rot, np.fliplr(rot)):
            perm = tuple(int(v) for v in g.ravel())
            if perm not in perms:
                perms.append(perm)
    assert len(perms) == 8
    return tuple(perms)


# Cell-index permutations of the 8 square symmetries; TRANSFORMS[0] is the
# identity. perm[c] is the source cell feeding new cell c.
TRANSFORMS = _build_transforms()


def pattern_bits(n: int) -> tuple[int, ...]:
    """Cells (x_1..x_9) of pattern n, most significant bit first."""
    if not 0 <= n < N_PATTERNS:
        raise ValueError(f"pattern index must be in [0, {N_PATTERNS}), got {n}")
    return tuple((n >> (N_CELLS - 1 - c)) & 1 for c in range(N_CELLS))


def pattern_index(bits) -> int:
    """Inverse of pattern_bits."""
    n = 0
    for b in bits:
        n = (n << 1) | int(b)
    return n


def transform_pattern(n: int, perm: tuple[int, ...]) -> int:
    """Apply one cell permutation to pattern n."""
    bits = pattern_bits(n)
    return pattern_index(bits[perm[c]] for c in range(N_CELLS))


def complement(n: int) -> int:
    """Pattern with every cell inverted."""
    return (N_PATTERNS - 1) - n


def pattern_currents(n: int, i_on: float, i_off: float) -> np.ndarray:
    """Feed currents of the nine grid oscillators for pattern n."""
    return np.array([i_on if b else i_off for b in pattern_bits(n)])


@dataclass(frozen=True)
class PatternClass:
    class_id: int               # 1-based
    fill_count: int
    members: tuple[int, ...]    # sorted orbit member indices
    representative: int         # smallest member

    @property
    def orbit_size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ClassTable:
    """All symmetry classes plus an index -> class_id lookup."""

    classes: tuple[PatternClass, ...]
    _lookup: np.ndarray

    def class_of(self, n: int) -> int:
        if not 0 <= n < N_PATTERNS:
            raise ValueError(f"pattern index must be in [0, {N_PATTERNS}), got {n}")
        return int(self._lookup[n])

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, class_id: int) -> PatternClass:
        cls = self.classes[class_id - 1]
        assert cls.class_id == class_id
        return cls


def enumerate_classes() -> ClassTable:
    """Partition all 512 patterns into symmetry orbits."""
    seen = np.zeros(N_PATTERNS, dtype=bool)
    orbits = []
    for n in range(N_PATTERNS):
        if seen[n]:
            continue
        orbit = sorted({transform_pattern(n, p) for p in TRANSFORMS})
        for m in orbit:
            seen[m] = True
        orbits.append(orbit)
    orbits.sort(key=lambda o: (bin(o[0]).count("1"), o[0]))
    lookup = np.empty(N_PATTERNS, dtype=np.int64)
    classes = []
    for cid, orbit in enumerate(orbits, start=1):
        classes.append(
            PatternClass(
                class_id=cid,
                fill_count=bin(orbit[0]).count("1"),
                members=tuple(orbit),
                representative=orbit[0],
            )
        )
        for m in orbit:
            lookup[m] = cid
    return ClassTable(tuple(classes), lookup)


def class_of(n: int, table: ClassTable) -> int:
    """Class id of pattern n (invariant under all 8 transforms)."""
    return table.class_of(n)


def write_class_table(path, table: ClassTable) -> None:
    """One line per class: class_id,fill_count,orbit_size,member,member,..."""
    with open(path, "w") as f:
        for cls in table.classes:
            members = ",".join(str(m) for m in cls.members)
            f.write(f"{cls.class_id},{cls.fill_count},{cls.orbit_size},{members}\n")
