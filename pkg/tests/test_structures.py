import pytest

from oracles import randomization_multiset_ok

from confuse.fields import field_make
from confuse.rings import RingSpec, enumerate_subgroups
from confuse.structures import (
    ConfusableStructure,
    catalog_fields,
    catalog_rings,
    diff_against_reference,
    field_confusable_sets,
    load_reference,
    ring_confusable_sets,
    structure_index_of,
)


def test_ring_worked_partitions():
    st = ring_confusable_sets(RingSpec(15, (1, 11)))
    assert st.sets == ((0,), (1, 11), (2, 7), (3,), (4, 14), (5, 10), (6,), (8, 13), (9,), (12,))
    assert st.randomizer == (1, 11)

    st = ring_confusable_sets(RingSpec(15, (1, 4, 11, 14)))
    assert set(st.sets) == {(0,), (1, 4, 11, 14), (2, 7, 8, 13), (3, 12), (5, 10), (6, 9)}

    st = ring_confusable_sets(RingSpec(6, (1, 5)))
    assert st.sets == ((0,), (1, 5), (2, 4), (3,))


def test_structure_index_of():
    st6 = ring_confusable_sets(RingSpec(6, (1, 5)))
    assert st6.sets[structure_index_of(st6, 4)] == (2, 4)
    assert structure_index_of(st6, 0) == st6.zero_index == 0
    st7 = field_confusable_sets(field_make(7, 1), 2)
    assert st7.sets[structure_index_of(st7, 5)] == (3, 5, 6)


def test_structure_validation_rejects_bad_partitions():
    fs = field_make(5, 1)
    with pytest.raises(ValueError):
        ConfusableStructure(fs, (1, 4), [(0,), (1, 4), (2,), (3,)])  # not closed under gamma
    with pytest.raises(ValueError):
        ConfusableStructure(fs, (1, 4), [(0,), (1, 4), (2, 3), (2, 3)])  # duplicate member
    with pytest.raises(ValueError):
        ConfusableStructure(fs, (1, 4), [(0, 1, 4), (2, 3)])  # zero not alone


def test_catalog_fields_rows():
    entries = catalog_fields(5)
    keyed = {(e.structure.carrier.describe(), e.structure.provenance["d"]): e for e in entries}
    f5 = keyed[("F_5", 2)].structure
    assert f5.sets == ((0,), (1, 4), (2, 3))
    assert f5.randomizer == (1, 4)
    assert keyed[("F_5", 1)].trivial and keyed[("F_5", 4)].trivial
    # trivial d=1 row has just {0} and everything else
    assert keyed[("F_4", 1)].structure.sets == ((0,), (1, 2, 3))

    f13 = {(e.structure.provenance["d"]): e for e in catalog_fields(13) if e.structure.carrier.describe() == "F_13"}
    assert f13[3].structure.sets == ((0,), (1, 5, 8, 12), (2, 3, 10, 11), (4, 6, 7, 9))


def test_catalog_rings_rows():
    entries = catalog_rings(9)
    by_key = {(e.structure.carrier.n, e.structure.randomizer): e.structure for e in entries}
    assert by_key[(8, (1, 5))].sets == ((0,), (1, 5), (2,), (3, 7), (4,), (6,))
    assert by_key[(4, (1, 3))].sets == ((0,), (1, 3), (2,))
    assert by_key[(9, (1, 4, 7))].sets == ((0,), (1, 4, 7), (2, 5, 8), (3,), (6,))
    # primes excluded, subgroup {1} rows flagged trivial
    assert all(e.structure.carrier.n in (4, 6, 8, 9) for e in entries)
    assert all(e.trivial == (len(e.structure.randomizer) == 1) for e in entries)


def test_catalog_reference_diff_clean():
    assert diff_against_reference(catalog_fields(20), load_reference("field")) == []
    assert diff_against_reference(catalog_rings(20), load_reference("ring")) == []


def test_catalog_reference_diff_detects_mutations():
    ref = load_reference("ring")
    entries = catalog_rings(20)
    mutated = {
        "max_carrier": ref["max_carrier"],
        "rows": [dict(r) for r in ref["rows"]],
    }
    mutated["rows"][0] = dict(mutated["rows"][0], sets=[["0"], ["1"], ["2"], ["3"]])
    problems = diff_against_reference(entries, mutated)
    assert problems and any("Z_4" in p for p in problems)


def test_every_cataloged_structure_randomizes_exactly():
    for entry in catalog_fields(20) + catalog_rings(20):
        st = entry.structure
        assert randomization_multiset_ok(st.carrier, st.randomizer, st.sets)


@pytest.mark.parametrize("n", range(2, 101))
def test_ring_partition_and_randomization_to_100(n):
    # exact multiset check on every subgroup of every modulus up to 100
    for G in enumerate_subgroups(n):
        st = ring_confusable_sets(RingSpec(n, G))
        assert sorted(a for s in st.sets for a in s) == list(range(n))
        assert randomization_multiset_ok(st.carrier, st.randomizer, st.sets)


def test_field_structure_matches_ring_structure_for_primes():
    # Z_p with a unit subgroup of size b gives the same partition as F_p with
    # the matching divisor d = (p-1)/b
    for p in (5, 7, 11, 13):
        fs = field_make(p, 1)
        for G in enumerate_subgroups(p):
            d = (p - 1) // len(G)
            ring_sets = set(ring_confusable_sets(RingSpec(p, G)).sets)
            field_sets = set(field_confusable_sets(fs, d).sets)
            assert ring_sets == field_sets
