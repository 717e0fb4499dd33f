"""Evaluable finitely generated groups with word metrics.

Three realizations are supported: finite groups given by a full
multiplication table, free groups on reduced words, and free-abelian
groups on integer vectors.  Every realization fixes one finite symmetric
generating set; word lengths, balls and conjugacy classes are computed
relative to it.
"""

from __future__ import annotations

import string
from collections import deque
from itertools import product

DEFAULT_BALL_CAP = 200_000


class ResourceCapExceeded(RuntimeError):
    """A ball or tuple enumeration outgrew the configured cap."""


class GroupElement:
    """An element of a realization, in canonical form.

    The canonical key is an index (finite table), a reduced word as a
    tuple of signed generator numbers (free), or an integer vector
    (free-abelian).
    """

    __slots__ = ("group", "key", "_hash")

    def __init__(self, group: "GroupRealization", key):
        self.group = group
        self.key = key
        self._hash = hash((id(group), key))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.multiply(self, other)

    def inverse(self) -> "GroupElement":
        return self.group.inverse(self)

    def word_length(self) -> int:
        return self.group.word_length(self)

    @property
    def is_identity(self) -> bool:
        return self.key == self.group.identity.key

    @property
    def sort_key(self):
        return (self.group.word_length(self), self.key)

    def name(self) -> str:
        return self.group.element_name(self)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group is other.group and self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "GroupElement"):
        if self.group is not other.group:
            raise ValueError("cannot order elements of different realizations")
        return self.sort_key < other.sort_key

    def __repr__(self):
        return f"<{self.name()}>"


class ConjClassId:
    """Conjugacy class, identified by its canonical representative."""

    __slots__ = ("representative",)

    def __init__(self, representative: GroupElement):
        object.__setattr__(self, "representative", representative)

    def __setattr__(self, name, value):
        raise AttributeError("ConjClassId is immutable")

    @property
    def is_identity_class(self) -> bool:
        return self.representative.is_identity

    def __eq__(self, other):
        if not isinstance(other, ConjClassId):
            return NotImplemented
        return self.representative == other.representative

    def __hash__(self):
        return hash(("conj", self.representative))

    def __lt__(self, other: "ConjClassId"):
        return self.representative < other.representative

    def __repr__(self):
        return f"<<{self.representative.name()}>>"


class GroupRealization:
    """Base class; concrete kinds override the keyed primitives."""

    kind: str = "?"

    def __init__(self, name: str):
        self.name = name
        self._identity: GroupElement | None = None
        self._ball_cache: dict[int, list[GroupElement]] = {}

    # -- keyed primitives (overridden) ---------------------------------

    def _mul_key(self, k1, k2):
        raise NotImplementedError

    def _inv_key(self, k):
        raise NotImplementedError

    def _identity_key(self):
        raise NotImplementedError

    def _length_key(self, k) -> int:
        raise NotImplementedError

    def _conj_rep_key(self, k):
        raise NotImplementedError

    def _check_key(self, k) -> bool:
        raise NotImplementedError

    def _ball_keys(self, r: int) -> list:
        raise NotImplementedError

    def _generator_keys(self) -> list:
        raise NotImplementedError

    def _name_key(self, k) -> str:
        raise NotImplementedError

    def _parse_key(self, text: str):
        raise NotImplementedError

    # -- public surface --------------------------------------------------

    @property
    def identity(self) -> GroupElement:
        if self._identity is None:
            self._identity = GroupElement(self, self._identity_key())
        return self._identity

    @property
    def generators(self) -> list[GroupElement]:
        return [GroupElement(self, k) for k in self._generator_keys()]

    def element(self, key) -> GroupElement:
        if not self._check_key(key):
            raise ValueError(f"invalid element key {key!r} for {self.name}")
        return GroupElement(self, key)

    def parse_element(self, text: str) -> GroupElement:
        return GroupElement(self, self._parse_key(text))

    def element_name(self, g: GroupElement) -> str:
        return self._name_key(g.key)

    def _require_member(self, g: GroupElement):
        if not isinstance(g, GroupElement) or g.group is not self:
            raise ValueError(f"element {g!r} does not belong to realization {self.name}")

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self._require_member(g)
        self._require_member(h)
        return GroupElement(self, self._mul_key(g.key, h.key))

    def inverse(self, g: GroupElement) -> GroupElement:
        self._require_member(g)
        return GroupElement(self, self._inv_key(g.key))

    def word_length(self, g: GroupElement) -> int:
        self._require_member(g)
        return self._length_key(g.key)

    def ball(self, r: int, cap: int | None = None) -> list[GroupElement]:
        """All elements with word length <= r, sorted by (length, key)."""
        if r < 0:
            raise ValueError("ball radius must be nonnegative")
        cap = DEFAULT_BALL_CAP if cap is None else cap
        if r not in self._ball_cache:
            keys = self._ball_keys_capped(r, cap)
            elems = [GroupElement(self, k) for k in keys]
            elems.sort(key=lambda e: e.sort_key)
            self._ball_cache[r] = elems
        ball = self._ball_cache[r]
        if len(ball) > cap:
            raise ResourceCapExceeded(
                f"ball of radius {r} in {self.name} has {len(ball)} elements (cap {cap})"
            )
        return ball

    def _ball_keys_capped(self, r: int, cap: int) -> list:
        keys = self._ball_keys(r)
        if len(keys) > cap:
            raise ResourceCapExceeded(
                f"ball of radius {r} in {self.name} has {len(keys)} elements (cap {cap})"
            )
        return keys

    def conjugacy_class_of(self, g: GroupElement) -> ConjClassId:
        self._require_member(g)
        return ConjClassId(GroupElement(self, self._conj_rep_key(g.key)))

    def describe(self) -> dict:
        return {"kind": self.kind, "name": self.name}

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


def group_eval(g: GroupElement, h: GroupElement, op: str) -> GroupElement:
    """Spec-surface group arithmetic: 'multiply' -> gh, 'inverse-left' -> g^-1 h."""
    if op == "multiply":
        return g * h
    if op == "inverse-left":
        return g.inverse() * h
    raise ValueError(f"unknown op {op!r}")


# ----------------------------------------------------------------------
# finite groups from multiplication tables
# ----------------------------------------------------------------------

class FiniteTableGroup(GroupRealization):
    """Finite group given by a full multiplication table (a Latin square)."""

    kind = "finite-table"

    def __init__(self, table, generators=None, names=None, name="G"):
        super().__init__(name)
        self.table = [tuple(row) for row in table]
        self.order = len(self.table)
        self._validate_table()
        self._identity_idx = self._find_identity()
        self._inverse_table = self._build_inverses()
        self._check_associativity()
        self.names = list(names) if names is not None else [f"g{i}" for i in range(self.order)]
        if len(self.names) != self.order:
            raise ValueError("names length does not match group order")
        if generators is None:
            generators = [i for i in range(self.order) if i != self._identity_idx]
        self.generator_indices = sorted(set(int(i) for i in generators))
        for i in self.generator_indices:
            if not 0 <= i < self.order:
                raise ValueError(f"generator index {i} out of range")
            if self._inverse_table[i] not in self.generator_indices:
                raise ValueError("generating set is not symmetric (closed under inverse)")
        self._lengths = self._bfs_lengths()
        self._conj_reps: list[int] | None = None

    # construction checks ------------------------------------------------

    def _validate_table(self):
        n = self.order
        if n == 0:
            raise ValueError("empty multiplication table")
        full = set(range(n))
        for row in self.table:
            if len(row) != n or set(row) != full:
                raise ValueError("multiplication table is not a Latin square (row)")
        for j in range(n):
            if {row[j] for row in self.table} != full:
                raise ValueError("multiplication table is not a Latin square (column)")

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.order)):
                return e
        raise ValueError("table has no two-sided identity")

    def _build_inverses(self) -> list[int]:
        e = self._identity_idx
        inv = [-1] * self.order
        for a in range(self.order):
            for b in range(self.order):
                if self.table[a][b] == e and self.table[b][a] == e:
                    inv[a] = b
                    break
            if inv[a] < 0:
                raise ValueError(f"element {a} has no inverse")
        return inv

    def _check_associativity(self):
        n = self.order
        if n <= 32:
            triples = product(range(n), repeat=3)
        else:
            # deterministic sample; full check would be n^3
            import random

            rng = random.Random(0)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(4096))
        t = self.table
        for a, b, c in triples:
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise ValueError(f"table is not associative at ({a},{b},{c})")

    def _bfs_lengths(self) -> list[int]:
        dist = [-1] * self.order
        dist[self._identity_idx] = 0
        queue = deque([self._identity_idx])
        while queue:
            x = queue.popleft()
            for s in self.generator_indices:
                y = self.table[x][s]
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if any(d < 0 for d in dist):
            raise ValueError("generators do not generate the group")
        return dist

    @property
    def diameter(self) -> int:
        return max(self._lengths)

    # keyed primitives ---------------------------------------------------

    def _mul_key(self, k1, k2):
        return self.table[k1][k2]

    def _inv_key(self, k):
        return self._inverse_table[k]

    def _identity_key(self):
        return self._identity_idx

    def _length_key(self, k) -> int:
        return self._lengths[k]

    def _check_key(self, k) -> bool:
        return isinstance(k, int) and 0 <= k < self.order

    def _ball_keys(self, r: int) -> list:
        return [i for i in range(self.order) if self._lengths[i] <= r]

    def _generator_keys(self) -> list:
        return list(self.generator_indices)

    def _conj_rep_key(self, k):
        if self._conj_reps is None:
            reps = list(range(self.order))
            seen = [False] * self.order
            for g in range(self.order):
                if seen[g]:
                    continue
                orbit = {self.table[self.table[h][g]][self._inverse_table[h]]
                         for h in range(self.order)}
                rep = min(orbit, key=lambda i: (self._lengths[i], i))
                for x in orbit:
                    reps[x] = rep
                    seen[x] = True
            self._conj_reps = reps
        return self._conj_reps[k]

    def elements(self) -> list[GroupElement]:
        return [GroupElement(self, i) for i in range(self.order)]

    def _name_key(self, k) -> str:
        return self.names[k]

    def _parse_key(self, text: str):
        text = text.strip()
        if text in self.names:
            return self.names.index(text)
        try:
            idx = int(text)
        except ValueError:
            raise ValueError(f"unknown element {text!r} of {self.name}") from None
        if not 0 <= idx < self.order:
            raise ValueError(f"element index {idx} out of range for {self.name}")
        return idx

    def describe(self) -> dict:
        d = super().describe()
        d.update(order=self.order, generators=self.generator_indices)
        return d


# ----------------------------------------------------------------------
# free and free-abelian groups
# ----------------------------------------------------------------------

def _default_letters(rank: int) -> list[str]:
    if rank > 26:
        raise ValueError("rank > 26 not supported by letter syntax")
    return list(string.ascii_lowercase[:rank])


class _LetteredGroup(GroupRealization):
    """Shared name/parse handling for word syntax 'a b A' (capital = inverse)."""

    def __init__(self, rank: int, letters=None, name: str = "G"):
        super().__init__(name)
        if rank < 1:
            raise ValueError("rank must be positive")
        self.rank = rank
        self.letters = list(letters) if letters is not None else _default_letters(rank)
        if len(self.letters) != rank or len(set(self.letters)) != rank:
            raise ValueError("need one distinct lowercase letter per generator")
        for ch in self.letters:
            if not (len(ch) == 1 and ch.islower()):
                raise ValueError(f"bad generator letter {ch!r}")

    def _letter_of(self, signed: int) -> str:
        ch = self.letters[abs(signed) - 1]
        return ch if signed > 0 else ch.upper()

    def _signed_of(self, token: str) -> int:
        low = token.lower()
        if low not in self.letters:
            raise ValueError(f"unknown generator letter {token!r} for {self.name}")
        idx = self.letters.index(low) + 1
        return idx if token.islower() else -idx

    def _tokenize(self, text: str) -> list[int]:
        text = text.strip()
        if text in ("", "e", "1"):
            return []
        tokens = text.split() if " " in text else list(text)
        return [self._signed_of(t) for t in tokens]

    def describe(self) -> dict:
        d = super().describe()
        d.update(rank=self.rank, generators=self.letters)
        return d


def _reduce_word(letters) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class FreeGroup(_LetteredGroup):
    """Free group on reduced words; keys are tuples of signed generator ids."""

    kind = "free"

    def _mul_key(self, k1, k2):
        return _reduce_word(k1 + k2)

    def _inv_key(self, k):
        return tuple(-x for x in reversed(k))

    def _identity_key(self):
        return ()

    def _length_key(self, k) -> int:
        return len(k)

    def _check_key(self, k) -> bool:
        if not isinstance(k, tuple):
            return False
        for x in k:
            if not isinstance(x, int) or x == 0 or abs(x) > self.rank:
                return False
        return all(k[i] != -k[i + 1] for i in range(len(k) - 1))

    def _ball_keys(self, r: int) -> list:
        # reduced words enumerate the tree exactly: extend by any letter
        # except the inverse of the last one
        gens = [s for i in range(1, self.rank + 1) for s in (i, -i)]
        sphere: list[tuple[int, ...]] = [()]
        keys: list[tuple[int, ...]] = [()]
        for _ in range(r):
            nxt = []
            for w in sphere:
                for s in gens:
                    if w and w[-1] == -s:
                        continue
                    nxt.append(w + (s,))
            keys.extend(nxt)
            sphere = nxt
        return keys

    def _generator_keys(self) -> list:
        return [(s,) for i in range(1, self.rank + 1) for s in (i, -i)]

    def _conj_rep_key(self, k):
        # cyclically reduce, then lexicographically least rotation
        w = list(k)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        if not w:
            return ()
        rotations = [tuple(w[i:] + w[:i]) for i in range(len(w))]
        return min(rotations)

    def _name_key(self, k) -> str:
        if not k:
            return "e"
        return " ".join(self._letter_of(x) for x in k)

    def _parse_key(self, text: str):
        return _reduce_word(self._tokenize(text))


class FreeAbelianGroup(_LetteredGroup):
    """Z^rank on integer vectors; word length is the l^1 norm."""

    kind = "free-abelian"

    def _mul_key(self, k1, k2):
        return tuple(a + b for a, b in zip(k1, k2))

    def _inv_key(self, k):
        return tuple(-a for a in k)

    def _identity_key(self):
        return (0,) * self.rank

    def _length_key(self, k) -> int:
        return sum(abs(a) for a in k)

    def _check_key(self, k) -> bool:
        return (
            isinstance(k, tuple)
            and len(k) == self.rank
            and all(isinstance(a, int) for a in k)
        )

    def _ball_keys(self, r: int) -> list:
        return [
            v
            for v in product(range(-r, r + 1), repeat=self.rank)
            if sum(abs(a) for a in v) <= r
        ]

    def _generator_keys(self) -> list:
        keys = []
        for i in range(self.rank):
            for s in (1, -1):
                v = [0] * self.rank
                v[i] = s
                keys.append(tuple(v))
        return keys

    def _conj_rep_key(self, k):
        return k

    def _name_key(self, k) -> str:
        if all(a == 0 for a in k):
            return "e"
        parts = []
        for i, a in enumerate(k):
            parts.extend([self._letter_of(i + 1)] * max(a, 0))
            parts.extend([self._letter_of(-(i + 1))] * max(-a, 0))
        return " ".join(parts)

    def _parse_key(self, text: str):
        v = [0] * self.rank
        for s in self._tokenize(text):
            v[abs(s) - 1] += 1 if s > 0 else -1
        return tuple(v)

    def vector(self, *coords: int) -> GroupElement:
        return self.element(tuple(int(c) for c in coords))


# ----------------------------------------------------------------------
# tuple enumeration (shared by complexes and growth scans)
# ----------------------------------------------------------------------

def enumerate_tuples(realization, count, total_length_bound, cap=None):
    """All `count`-tuples of elements with summed word length <= bound.

    Sorted by (total length, per-entry sort keys); the empty tuple is the
    sole 0-tuple.
    """
    cap = DEFAULT_BALL_CAP if cap is None else cap
    if count == 0:
        return [()]
    ball = realization.ball(total_length_bound, cap=cap)
    lengths = {g: g.word_length() for g in ball}
    out: list[tuple] = []

    def extend(prefix, remaining, budget):
        if len(out) > cap:
            raise ResourceCapExceeded(
                f"tuple enumeration exceeded cap {cap} in {realization.name}"
            )
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for g in ball:
            lg = lengths[g]
            if lg > budget:
                continue
            prefix.append(g)
            extend(prefix, remaining - 1, budget - lg)
            prefix.pop()

    extend([], count, total_length_bound)
    if len(out) > cap:
        raise ResourceCapExceeded(
            f"tuple enumeration exceeded cap {cap} in {realization.name}"
        )
    out.sort(key=lambda t: (sum(lengths[g] for g in t), [g.sort_key for g in t]))
    return out


def tuple_total_length(tup) -> int:
    return sum(g.word_length() for g in tup)


# ----------------------------------------------------------------------
# built-in groups
# ----------------------------------------------------------------------

def cyclic_group(n: int, name: str | None = None) -> FiniteTableGroup:
    """Z/n with generating set {t, t^-1}."""
    if n < 1:
        raise ValueError("order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    names = ["e"] + [f"t{'' if k == 1 else '^' + str(k)}" for k in range(1, n)]
    gens = sorted({1 % n, (n - 1) % n} - {0})
    return FiniteTableGroup(table, generators=gens or None, names=names,
                            name=name or f"Z/{n}")


def symmetric_group_3() -> FiniteTableGroup:
    """S3 generated by the adjacent transpositions (12) and (23)."""
    perms = sorted(product(range(3), repeat=3))
    perms = [p for p in perms if set(p) == {0, 1, 2}]

    def compose(p, q):  # (p∘q)(i) = p(q(i))
        return tuple(p[q[i]] for i in range(3))

    index = {p: i for i, p in enumerate(perms)}
    table = [[index[compose(p, q)] for q in perms] for p in perms]
    cycle_names = {
        (0, 1, 2): "e", (1, 0, 2): "(12)", (0, 2, 1): "(23)",
        (2, 1, 0): "(13)", (1, 2, 0): "(123)", (2, 0, 1): "(132)",
    }
    names = [cycle_names[p] for p in perms]
    gens = [index[(1, 0, 2)], index[(0, 2, 1)]]
    return FiniteTableGroup(table, generators=gens, names=names, name="S3")


def direct_product(g1: FiniteTableGroup, g2: FiniteTableGroup,
                   name: str | None = None) -> FiniteTableGroup:
    """Direct product of finite-table groups; generators are (s,e) and (e,s)."""
    n1, n2 = g1.order, g2.order

    def enc(a, b):
        return a * n2 + b

    table = [
        [enc(g1.table[a1][b1], g2.table[a2][b2]) for b1 in range(n1) for b2 in range(n2)]
        for a1 in range(n1)
        for a2 in range(n2)
    ]
    names = [f"({g1.names[a]},{g2.names[b]})" for a in range(n1) for b in range(n2)]
    e1, e2 = g1._identity_idx, g2._identity_idx
    gens = [enc(s, e2) for s in g1.generator_indices] + \
           [enc(e1, s) for s in g2.generator_indices]
    return FiniteTableGroup(table, generators=gens, names=names,
                            name=name or f"{g1.name}x{g2.name}")


def klein_four_group() -> FiniteTableGroup:
    return direct_product(cyclic_group(2), cyclic_group(2), name="Z/2xZ/2")


def free_group(rank: int, name: str | None = None) -> FreeGroup:
    return FreeGroup(rank, name=name or f"F{rank}")


def free_abelian_group(rank: int, name: str | None = None) -> FreeAbelianGroup:
    return FreeAbelianGroup(rank, name=name or (f"Z^{rank}" if rank > 1 else "Z"))


_BUILTIN_ALIASES = {
    "S3": symmetric_group_3,
    "K4": klein_four_group,
    "Z/2xZ/2": klein_four_group,
}


def builtin_group(spec: str) -> GroupRealization:
    """Build a group from a short name: Z/4, S3, K4, F2, Z, Z^2, ..."""
    spec = spec.strip()
    if spec in _BUILTIN_ALIASES:
        return _BUILTIN_ALIASES[spec]()
    if spec.startswith("Z/"):
        return cyclic_group(int(spec[2:]))
    if spec.startswith("F"):
        return free_group(int(spec[1:]))
    if spec == "Z":
        return free_abelian_group(1)
    if spec.startswith("Z^"):
        return free_abelian_group(int(spec[2:]))
    raise ValueError(f"unknown builtin group {spec!r}")


def builtin_group_catalog() -> list[dict]:
    return [
        {"name": "Z/k", "kind": "finite-table", "params": {"k": "order, integer >= 1"}},
        {"name": "S3", "kind": "finite-table", "params": {}},
        {"name": "K4", "kind": "finite-table", "params": {}},
        {"name": "Fk", "kind": "free", "params": {"k": "rank, 1..26"}},
        {"name": "Z", "kind": "free-abelian", "params": {}},
        {"name": "Z^k", "kind": "free-abelian", "params": {"k": "rank, 1..26"}},
    ]


# ----------------------------------------------------------------------
# group specification documents
# ----------------------------------------------------------------------

def dump_group_doc(g: GroupRealization) -> str:
    """Structured key-value text form of a realization."""
    lines = [f"kind: {g.kind}", f"name: {g.name}"]
    if isinstance(g, FiniteTableGroup):
        lines.append("generators: " + " ".join(str(i) for i in g.generator_indices))
        lines.append("names: " + " ".join(g.names))
        lines.append("table:")
        for row in g.table:
            lines.append(" ".join(str(x) for x in row))
    elif isinstance(g, _LetteredGroup):
        lines.append(f"rank: {g.rank}")
        lines.append("generators: " + " ".join(g.letters))
    else:
        raise TypeError(f"cannot serialize {type(g).__name__}")
    return "\n".join(lines) + "\n"


def load_group_doc(text: str) -> GroupRealization:
    fields: dict[str, str] = {}
    table_rows: list[list[int]] = []
    in_table = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if in_table:
            table_rows.append([int(x) for x in line.split()])
            continue
        if ":" not in line:
            raise ValueError(f"bad group document line {raw!r}")
        key, _, value = line.partition(":")
        key = key.strip().lower()
        if key == "table":
            in_table = True
            continue
        fields[key] = value.strip()
    kind = fields.get("kind")
    name = fields.get("name", "G")
    if kind == "finite-table":
        if not table_rows:
            raise ValueError("finite-table document has no table")
        generators = [int(x) for x in fields["generators"].split()] if "generators" in fields else None
        names = fields["names"].split() if "names" in fields else None
        return FiniteTableGroup(table_rows, generators=generators, names=names, name=name)
    if kind in ("free", "free-abelian"):
        rank = int(fields["rank"])
        letters = fields["generators"].split() if "generators" in fields else None
        cls = FreeGroup if kind == "free" else FreeAbelianGroup
        return cls(rank, letters=letters, name=name)
    raise ValueError(f"unknown group kind {kind!r}")


def load_group_file(path) -> GroupRealization:
    with open(path, "r", encoding="utf-8") as fh:
        return load_group_doc(fh.read())


def resolve_group(spec: str) -> GroupRealization:
    """Accept a builtin name or a path to a group document."""
    import os

    if os.path.exists(spec):
        return load_group_file(spec)
    return builtin_group(spec)
