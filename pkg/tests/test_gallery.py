from confuse.expansion import find_expansion
from confuse.gallery import GALLERY
from confuse.schemes import scheme_from_expansion
from confuse.verify import verify_correct, verify_secure


def test_every_gallery_embedding_validates():
    for name, ex in GALLERY.items():
        exp = ex.expansion()  # validates internally
        assert len(exp.map1) == ex.table.m1
        assert len(exp.map2) == ex.table.m2


def test_search_reproduces_every_gallery_structure():
    for name, ex in GALLERY.items():
        st = ex.structure()
        found = find_expansion(ex.table, st)
        assert found is not None, name
        found.validate(ex.table)


def test_every_gallery_scheme_verifies():
    for name, ex in GALLERY.items():
        scheme = scheme_from_expansion(ex.expansion())
        assert verify_correct(scheme, ex.table).ok, name
        assert verify_secure(scheme, ex.table).ok, name
