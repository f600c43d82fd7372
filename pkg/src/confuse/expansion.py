"""Function tables and the search for feasible expanded functions.

A feasible expansion embeds an m1 x m2 function table into addition over a
carrier: injective relabelings map1/map2 of the two inputs plus a bijection
between the confusable-set indices that the cell sums hit and the table's
output labels.  The search is a deterministic backtracker; brute-force
enumeration over all injective map pairs is kept in the test suite as the
independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlphabetTooLarge
from .fields import field_make, is_prime, prime_power
from .rates import Rate
from .rings import RingSpec, enumerate_subgroups
from .structures import ConfusableStructure, field_confusable_sets, ring_confusable_sets


@dataclass(frozen=True)
class FunctionTable:
    """Target f(W1, W2) as a dense matrix of output labels 0..k-1."""

    m1: int
    m2: int
    outputs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("dimensions must be positive")
        if len(self.outputs) != self.m1 or any(len(r) != self.m2 for r in self.outputs):
            raise ValueError("outputs shape must be m1 x m2")
        used = {v for row in self.outputs for v in row}
        if used != set(range(len(used))):
            raise ValueError(f"labels must be 0..k-1 with every label used, got {sorted(used)}")

    @property
    def output_count(self) -> int:
        return 1 + max(v for row in self.outputs for v in row)

    @classmethod
    def from_rows(cls, rows) -> "FunctionTable":
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        return cls(len(rows), len(rows[0]), rows)

    def to_json(self) -> dict:
        return {"m1": self.m1, "m2": self.m2, "outputs": [list(r) for r in self.outputs]}

    @classmethod
    def from_json(cls, obj: dict) -> "FunctionTable":
        t = cls.from_rows(obj["outputs"])
        if t.m1 != obj.get("m1", t.m1) or t.m2 != obj.get("m2", t.m2):
            raise ValueError("declared dimensions disagree with the outputs matrix")
        return t

    def identical_rows(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.m1)
            for j in range(i + 1, self.m1)
            if self.outputs[i] == self.outputs[j]
        ]

    def identical_cols(self) -> list[tuple[int, int]]:
        cols = list(zip(*self.outputs))
        return [
            (i, j)
            for i in range(self.m2)
            for j in range(i + 1, self.m2)
            if cols[i] == cols[j]
        ]


def equal_table(m: int) -> FunctionTable:
    """Equality test on {0..m-1}: label 1 when the inputs match, else 0."""
    return FunctionTable.from_rows(
        [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    )


@dataclass
class FeasibleExpansion:
    """Invertible relabelings plus the set-index <-> label bijection."""

    structure: ConfusableStructure
    map1: tuple[int, ...]
    map2: tuple[int, ...]
    out_map: dict[int, int]  # confusable-set index -> output label

    def table(self) -> FunctionTable:
        add = self.structure.carrier.add
        rows = [
            [self.out_map[self.structure.index_of(add(a, b))] for b in self.map2]
            for a in self.map1
        ]
        return FunctionTable.from_rows(rows)

    def validate(self, f: FunctionTable) -> None:
        """Cell-by-cell re-check, independent of the search's bookkeeping."""
        if len(set(self.map1)) != len(self.map1) or len(set(self.map2)) != len(self.map2):
            raise ValueError("maps must be injective")
        if len(self.map1) != f.m1 or len(self.map2) != f.m2:
            raise ValueError("map lengths must match the table")
        inv = {}
        for idx, label in self.out_map.items():
            if label in inv:
                raise ValueError("out_map is not invertible")
            inv[label] = idx
        add = self.structure.carrier.add
        hit = set()
        for i, a in enumerate(self.map1):
            for j, b in enumerate(self.map2):
                idx = self.structure.index_of(add(a, b))
                hit.add(idx)
                if self.out_map.get(idx) != f.outputs[i][j]:
                    raise ValueError(
                        f"cell ({i},{j}) lands in set {idx} which maps to "
                        f"{self.out_map.get(idx)}, table says {f.outputs[i][j]}"
                    )
        if hit != set(self.out_map):
            raise ValueError("out_map domain must be exactly the set indices hit")

    def to_json(self) -> dict:
        s = self.structure
        return {
            "carrier": s.carrier.to_json() | {"kind": s.carrier.kind},
            "structure": s.provenance,
            "map1": list(self.map1),
            "map2": list(self.map2),
            "out_map": {str(k): v for k, v in sorted(self.out_map.items())},
        }


def find_expansion(f: FunctionTable, structure: ConfusableStructure):
    """Lexicographically-first feasible expansion over this structure, or None.

    map1 values are assigned in row order, then map2 in column order; carrier
    elements are tried in ascending encoding.  Each map2 assignment fills a
    column of cells, and the partial out_map prunes as soon as two labels
    claim one set or one label claims two sets.
    """
    size = structure.size
    if f.m1 > size or f.m2 > size:
        raise AlphabetTooLarge(
            f"table is {f.m1}x{f.m2} but the carrier has only {size} elements"
        )
    add = structure.carrier.add
    index_of = structure._index
    outputs = f.outputs
    m1, m2 = f.m1, f.m2
    map1 = [0] * m1
    map2 = [0] * m2
    used1 = set()
    used2 = set()
    set_to_label: dict[int, int] = {}
    label_to_set: dict[int, int] = {}

    def assign2(j: int) -> bool:
        if j == m2:
            return True
        for v in range(size):
            if v in used2:
                continue
            added = []
            ok = True
            for i in range(m1):
                idx = index_of[add(map1[i], v)]
                label = outputs[i][j]
                bound = set_to_label.get(idx)
                if bound is None:
                    if label_to_set.get(label) is not None:
                        ok = False
                        break
                    set_to_label[idx] = label
                    label_to_set[label] = idx
                    added.append((idx, label))
                elif bound != label:
                    ok = False
                    break
            if ok:
                map2[j] = v
                used2.add(v)
                if assign2(j + 1):
                    return True
                used2.discard(v)
            for idx, label in added:
                del set_to_label[idx]
                del label_to_set[label]
        return False

    def assign1(i: int) -> bool:
        if i == m1:
            return assign2(0)
        for v in range(size):
            if v in used1:
                continue
            map1[i] = v
            used1.add(v)
            if assign1(i + 1):
                return True
            used1.discard(v)
        return False

    if assign1(0):
        return FeasibleExpansion(structure, tuple(map1), tuple(map2), dict(set_to_label))
    return None


def iter_carrier_structures(max_size: int, kinds=("field", "ring")):
    """Structures in search order: carriers ascending by size, fields before
    rings at equal size; per carrier, divisors ascending / subgroups in
    canonical order.  Prime Z_p duplicates F_p and is skipped when both kinds
    are requested."""
    for size in range(2, max_size + 1):
        pp = prime_power(size)
        if "field" in kinds and pp is not None:
            spec = field_make(*pp)
            for d in sorted(x for x in range(1, size) if (size - 1) % x == 0):
                yield field_confusable_sets(spec, d)
        if "ring" in kinds:
            if "field" in kinds and is_prime(size):
                continue
            for G in enumerate_subgroups(size):
                yield ring_confusable_sets(RingSpec(size, G))


def search_expansions(
    f: FunctionTable,
    max_size: int,
    kinds=("field", "ring"),
    limit: int | None = None,
):
    """All (structure, expansion) hits up to the carrier-size bound, in
    deterministic search order.  Empty list when nothing fits."""
    hits = []
    for structure in iter_carrier_structures(max_size, kinds):
        if f.m1 > structure.size or f.m2 > structure.size:
            continue
        exp = find_expansion(f, structure)
        if exp is not None:
            hits.append((structure, exp))
            if limit is not None and len(hits) >= limit:
                break
    return hits


@dataclass
class ConverseReport:
    identical_rows: list[tuple[int, int]]
    identical_cols: list[tuple[int, int]]
    converse_bits: tuple[Rate, Rate] | None
    achieved_bits: tuple[Rate, Rate] | None
    optimal: bool | None


def converse_report(f: FunctionTable, expansion: FeasibleExpansion | None = None) -> ConverseReport:
    """No-security lower bound (log2 m1, log2 m2), asserted only when the
    table has no identical rows or columns; with an expansion over a carrier
    of size m1 = m2, the achieved rates are flagged optimal."""
    rows = f.identical_rows()
    cols = f.identical_cols()
    converse = None
    if not rows and not cols:
        converse = (Rate.log2(f.m1), Rate.log2(f.m2))
    achieved = None
    optimal = None
    if expansion is not None:
        q = expansion.structure.size
        achieved = (Rate.log2(q), Rate.log2(q))
        if converse is not None:
            optimal = q == f.m1 == f.m2
    return ConverseReport(rows, cols, converse, achieved, optimal)
