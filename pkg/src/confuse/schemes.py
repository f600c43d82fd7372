"""Concrete scheme constructions.

A Scheme packages the shared-randomness support (atoms with integer weights),
both encoders, the decoder, and exact rates.  Encoders/decoder are plain
functions of (input, atom) so large product supports can stay lazy; the exact
verifier streams over the atoms.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from .errors import SchemaError, SizeBoundExceeded, TotalityError
from .expansion import FeasibleExpansion, FunctionTable
from .fields import field_make
from .rates import Rate
from .verify import verify_secure

MAX_ATOMS_MATERIALIZED = 200_000


@dataclass
class Scheme:
    m1: int
    m2: int
    atoms: Sequence
    weights: Sequence[int] | None
    enc1: Callable
    enc2: Callable
    dec: Callable
    rate1: Rate
    rate2: Rate
    kind: str
    expansion: FeasibleExpansion | None = None
    meta: dict = dc_field(default_factory=dict)

    @property
    def total_weight(self) -> int:
        if self.weights is None:
            return len(self.atoms)
        return sum(self.weights)

    def z_support(self):
        if self.weights is None:
            return [(a, 1) for a in self.atoms]
        return list(zip(self.atoms, self.weights))


# ---------------------------------------------------------------------------
# masked-sum scheme built from a feasible expansion
# ---------------------------------------------------------------------------

def scheme_from_expansion(exp: FeasibleExpansion, z_values=None) -> Scheme:
    """X1 = gamma * map1[W1] + z, X2 = gamma * map2[W2] - z; the decoder adds
    the codewords and reads the confusable-set index.

    gamma is uniform over the structure's randomizer; z is uniform over
    z_values (the whole carrier by default).
    """
    st = exp.structure
    carrier = st.carrier
    zs = list(carrier.elements()) if z_values is None else sorted(z_values)
    atoms = [(g, z) for g in st.randomizer for z in zs]
    map1, map2, out_map = exp.map1, exp.map2, dict(exp.out_map)
    add, sub, mul = carrier.add, carrier.sub, carrier.mul

    def enc1(w1, atom):
        g, z = atom
        return (add(mul(g, map1[w1]), z),)

    def enc2(w2, atom):
        g, z = atom
        return (sub(mul(g, map2[w2]), z),)

    def dec(x1, x2):
        return out_map.get(st.index_of(add(x1[0], x2[0])), 0)

    full = z_values is None
    if full:
        r1 = r2 = Rate.log2(carrier.size)
    else:
        r1 = Rate.log2(len({enc1(w, a) for w in range(len(map1)) for a in atoms}))
        r2 = Rate.log2(len({enc2(w, a) for w in range(len(map2)) for a in atoms}))
    return Scheme(
        m1=len(map1),
        m2=len(map2),
        atoms=atoms,
        weights=None,
        enc1=enc1,
        enc2=enc2,
        dec=dec,
        rate1=r1,
        rate2=r2,
        kind="masked_sum" if full else "masked_sum_optimized",
        expansion=exp,
        meta={"z_support": zs, "gamma_support": list(st.randomizer)},
    )


def _additive_subgroups(carrier) -> list[tuple[int, ...]]:
    size = carrier.size
    found = {frozenset([0])}
    queue = [frozenset([0])]
    while queue:
        H = queue.pop()
        for x in range(1, size):
            if x in H:
                continue
            K = set(H)
            y = x
            while y not in K:
                K.update(carrier.add(h, y) for h in H)
                y = carrier.add(y, x)
            K = frozenset(K)
            if K not in found:
                found.add(K)
                queue.append(K)
    return sorted((tuple(sorted(H)) for H in found), key=lambda t: (len(t), t))


def optimize_additive_randomness(exp: FeasibleExpansion, all_subsets: bool = False) -> Scheme:
    """Smallest additive-noise support that still verifies secure.

    Candidates are tried in increasing entropy (= size, uniform support)
    order: cosets of additive subgroups first, then, behind the flag, every
    remaining subset.  The full carrier is its own coset, so a passing scheme
    always exists; rates are recomputed from the encoder ranges.
    """
    carrier = exp.structure.carrier
    f = exp.table()
    candidates: list[tuple[int, tuple[int, ...]]] = []  # (tier, support)
    seen = set()
    for H in _additive_subgroups(carrier):
        for c in carrier.elements():
            coset = tuple(sorted(carrier.add(h, c) for h in H))
            if coset not in seen:
                seen.add(coset)
                candidates.append((0, coset))
    if all_subsets:
        for r in range(1, carrier.size + 1):
            for combo in itertools.combinations(carrier.elements(), r):
                if combo not in seen:
                    seen.add(combo)
                    candidates.append((1, combo))
    # entropy (size) first; subgroup cosets ahead of plain subsets at a tie
    candidates.sort(key=lambda t: (len(t[1]), t[0], t[1]))
    for _, zs in candidates:
        scheme = scheme_from_expansion(exp, z_values=zs)
        if verify_secure(scheme, f).ok:
            return scheme
    return scheme_from_expansion(exp)  # unreachable: full support always passes


# ---------------------------------------------------------------------------
# equality over a composite alphabet via residue decomposition
# ---------------------------------------------------------------------------

def _factorize(m: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            k = 0
            while m % d == 0:
                m //= d
                k += 1
            out.append((d, k))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


def crt_equal_scheme(
    m: int,
    max_enumerated_m: int = 8,
    sample_permutations: tuple[int, int] | None = None,
) -> Scheme:
    """Equality on {0..m-1} at log2(m) bits per party for any m >= 2.

    Both inputs pass through one shared uniform permutation of {0..m-1}; each
    prime-power factor q of m gets its own field F_q where the residue mod q
    is scaled by a unit gamma and masked by z (the same mask on both sides).
    The decoder declares equality iff the codeword tuples agree, which the
    residue decomposition makes exact.

    The permutation support is enumerated exactly up to max_enumerated_m;
    past that, pass sample_permutations=(count, seed) to draw a sampled
    support.  Sampled schemes stay correct on every atom, but the exact
    security check is only meaningful for the fully enumerated supports.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    factors = _factorize(m)
    fields = [field_make(p, k) for p, k in factors]
    qs = [fs.q for fs in fields]
    sampled = False
    if m > max_enumerated_m:
        if sample_permutations is None:
            raise SizeBoundExceeded(
                f"m = {m}: permutation support {m}! is past the exact-enumeration "
                "cap; pass sample_permutations=(count, seed)"
            )
        count, seed = sample_permutations
        rng = random.Random(seed)
        perms = []
        for _ in range(count):
            pi = list(range(m))
            rng.shuffle(pi)
            perms.append(tuple(pi))
        sampled = True
    else:
        perms = list(itertools.permutations(range(m)))
    per_factor = [(q - 1) * q for q in qs]
    block = 1
    for b in per_factor:
        block *= b
    n_atoms = len(perms) * block

    # decode atom index -> (perm, [(gamma, z)] per factor); mixed-radix layout
    def atom_parts(a: int):
        pi, rest = divmod(a, block)
        parts = []
        for q in qs:
            rest, r = divmod(rest, (q - 1) * q)
            gi, z = divmod(r, q)
            parts.append((gi + 1, z))
        return perms[pi], parts

    def encode(w, atom):
        perm, parts = atom_parts(atom)
        pw = perm[w]
        out = []
        for fs, (g, z) in zip(fields, parts):
            out.append(fs.add(fs.mul(g, pw % fs.q), z))
        return tuple(out)

    def dec(x1, x2):
        return 1 if x1 == x2 else 0

    rate = Rate.log2(m)
    return Scheme(
        m1=m,
        m2=m,
        atoms=range(n_atoms),
        weights=None,
        enc1=encode,
        enc2=encode,
        dec=dec,
        rate1=rate,
        rate2=rate,
        kind="crt_equal",
        meta={"m": m, "factors": factors, "atom_parts": atom_parts, "sampled": sampled},
    )


# ---------------------------------------------------------------------------
# row-mask baseline (permuted masked row values)
# ---------------------------------------------------------------------------

def row_mask_baseline(f: FunctionTable) -> Scheme:
    """Generic baseline: Bob sends every row's output masked by a per-row
    one-time pad, in an order shuffled by a shared permutation of the rows;
    Alice sends her row's position and its mask.

    Rates are (log2 m1 + log2 k, m1 * log2 k) for k output labels.
    """
    m1, k = f.m1, f.output_count
    perms = list(itertools.permutations(range(m1)))
    atoms = [
        (pi, zs)
        for pi in perms
        for zs in itertools.product(range(k), repeat=m1)
    ]
    if len(atoms) > MAX_ATOMS_MATERIALIZED:
        raise SizeBoundExceeded("baseline atom support too large to enumerate")
    outputs = f.outputs

    def enc1(w1, atom):
        pi, zs = atom
        return (pi[w1], zs[w1])

    def enc2(w2, atom):
        pi, zs = atom
        slots = [0] * m1
        for row in range(m1):
            slots[pi[row]] = (outputs[row][w2] + zs[row]) % k
        return tuple(slots)

    def dec(x1, x2):
        pos, mask = x1
        return (x2[pos] - mask) % k

    return Scheme(
        m1=m1,
        m2=f.m2,
        atoms=atoms,
        weights=None,
        enc1=enc1,
        enc2=enc2,
        dec=dec,
        rate1=Rate.log2(m1) + Rate.log2(k),
        rate2=Rate.log2(k).scaled(m1),
        kind="row_mask_baseline",
        meta={"outputs": [list(r) for r in outputs], "labels": k},
    )


# ---------------------------------------------------------------------------
# fully tabulated schemes as data
# ---------------------------------------------------------------------------

def _to_hashable(x):
    if isinstance(x, list):
        return tuple(_to_hashable(v) for v in x)
    return x


def load_custom_scheme(source) -> Scheme:
    """Load a fully tabulated scheme from a JSON file path, file object, or
    already-parsed dict.  Raises SchemaError on malformed input and
    TotalityError when an encoder or decoder table has holes."""
    if isinstance(source, (str, bytes)):
        with open(source) as fh:
            obj = json.load(fh)
    elif hasattr(source, "read"):
        obj = json.load(source)
    else:
        obj = source
    if not isinstance(obj, dict):
        raise SchemaError("scheme JSON must be an object")
    required = ["m1", "m2", "alphabets1", "alphabets2", "z_support", "enc1", "enc2", "dec"]
    for key in required:
        if key not in obj:
            raise SchemaError(f"missing key {key!r}")
    m1, m2 = obj["m1"], obj["m2"]
    if not (isinstance(m1, int) and isinstance(m2, int) and m1 >= 1 and m2 >= 1):
        raise SchemaError("m1/m2 must be positive integers")
    alph1, alph2 = obj["alphabets1"], obj["alphabets2"]
    for a in (alph1, alph2):
        if not (isinstance(a, list) and a and all(isinstance(s, int) and s >= 1 for s in a)):
            raise SchemaError("alphabets must be non-empty lists of positive sizes")
    support = obj["z_support"]
    if not isinstance(support, list) or not support:
        raise SchemaError("z_support must be a non-empty list")
    atoms = []
    weights = []
    for row in support:
        if not isinstance(row, dict) or "atom" not in row:
            raise SchemaError("each z_support row needs an 'atom'")
        wt = row.get("weight", 1)
        if not isinstance(wt, int) or wt <= 0:
            raise SchemaError("weights must be positive integers")
        atoms.append(_to_hashable(row["atom"]))
        weights.append(wt)
    if len(set(atoms)) != len(atoms):
        raise SchemaError("atoms must be distinct")
    atom_index = {a: i for i, a in enumerate(atoms)}

    def read_enc(name, m, alphabets):
        table = obj[name]
        if not isinstance(table, list) or len(table) != m:
            raise TotalityError(f"{name} must have one row per input value")
        parsed = []
        for w, row in enumerate(table):
            if not isinstance(row, list) or len(row) != len(atoms):
                raise TotalityError(f"{name}[{w}] must have one codeword per atom")
            cw = []
            for c in row:
                if not isinstance(c, list) or len(c) != len(alphabets):
                    raise SchemaError(f"{name}[{w}] codeword has wrong arity")
                for s, size in zip(c, alphabets):
                    if not isinstance(s, int) or not 0 <= s < size:
                        raise SchemaError(f"{name}[{w}] symbol {s} outside alphabet of size {size}")
                cw.append(tuple(c))
            parsed.append(cw)
        return parsed

    enc1_table = read_enc("enc1", m1, alph1)
    enc2_table = read_enc("enc2", m2, alph2)

    dec_rows = obj["dec"]
    if not isinstance(dec_rows, list):
        raise SchemaError("dec must be a list of {x1, x2, f} rows")
    dec_map = {}
    for row in dec_rows:
        try:
            key = (tuple(row["x1"]), tuple(row["x2"]))
            val = row["f"]
        except (TypeError, KeyError) as e:
            raise SchemaError(f"bad dec row {row!r}") from e
        if not isinstance(val, int):
            raise SchemaError("dec outputs must be integers")
        if key in dec_map:
            raise SchemaError(f"duplicate dec row for {key}")
        dec_map[key] = val
    all_x1 = list(itertools.product(*(range(s) for s in alph1)))
    all_x2 = list(itertools.product(*(range(s) for s in alph2)))
    for x1 in all_x1:
        for x2 in all_x2:
            if (x1, x2) not in dec_map:
                raise TotalityError(f"dec undefined on {(x1, x2)}")

    def enc1(w1, atom):
        return enc1_table[w1][atom_index[atom]]

    def enc2(w2, atom):
        return enc2_table[w2][atom_index[atom]]

    def dec(x1, x2):
        return dec_map[(x1, x2)]

    rate1 = Rate.zero()
    for s in alph1:
        rate1 = rate1 + Rate.log2(s)
    rate2 = Rate.zero()
    for s in alph2:
        rate2 = rate2 + Rate.log2(s)
    uniform = all(w == weights[0] for w in weights) and weights[0] == 1
    return Scheme(
        m1=m1,
        m2=m2,
        atoms=atoms,
        weights=None if uniform else weights,
        enc1=enc1,
        enc2=enc2,
        dec=dec,
        rate1=rate1,
        rate2=rate2,
        kind="custom",
        meta={"name": obj.get("name", "")},
    )


def serialize_scheme(scheme: Scheme, name: str = "") -> dict:
    """Tabulate a scheme into the custom-scheme JSON form.

    Symbols are remapped per codeword position onto compact 0..s-1 alphabets
    so reloaded rates equal the range-based rates of optimized schemes.
    """
    if len(scheme.atoms) > MAX_ATOMS_MATERIALIZED:
        raise SizeBoundExceeded("scheme support too large to tabulate")
    atoms = list(scheme.atoms)
    cw1 = [[scheme.enc1(w, a) for a in atoms] for w in range(scheme.m1)]
    cw2 = [[scheme.enc2(w, a) for a in atoms] for w in range(scheme.m2)]

    def remap(rows):
        arity = len(rows[0][0])
        values = [sorted({cw[i] for row in rows for cw in row}) for i in range(arity)]
        lookup = [{v: j for j, v in enumerate(vals)} for vals in values]
        mapped = [[tuple(lookup[i][cw[i]] for i in range(arity)) for cw in row] for row in rows]
        return mapped, values

    mapped1, values1 = remap(cw1)
    mapped2, values2 = remap(cw2)
    dec_rows = []
    for idx1 in itertools.product(*(range(len(v)) for v in values1)):
        raw1 = tuple(values1[i][s] for i, s in enumerate(idx1))
        for idx2 in itertools.product(*(range(len(v)) for v in values2)):
            raw2 = tuple(values2[i][s] for i, s in enumerate(idx2))
            dec_rows.append({"x1": list(idx1), "x2": list(idx2), "f": scheme.dec(raw1, raw2)})
    weights = scheme.weights or [1] * len(atoms)
    return {
        "name": name or scheme.kind,
        "m1": scheme.m1,
        "m2": scheme.m2,
        "alphabets1": [len(v) for v in values1],
        "alphabets2": [len(v) for v in values2],
        "z_support": [{"atom": _jsonable_atom(a), "weight": w} for a, w in zip(atoms, weights)],
        "enc1": [[list(cw) for cw in row] for row in mapped1],
        "enc2": [[list(cw) for cw in row] for row in mapped2],
        "dec": dec_rows,
    }


def _jsonable_atom(a):
    if isinstance(a, tuple):
        return [_jsonable_atom(v) for v in a]
    return a
