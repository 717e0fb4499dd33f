"""Chain-level operators and truncated complexes.

The boundary b, the degree-raising operator B, and the signed cyclic
rotation tau act on sparse chains; tuples are filtered by total word
length, which both b and B respect (merging never increases length and
unit insertions add none), so the radius-R spans are genuine
subcomplexes.  Truncated complexes assemble exact boundary matrices for
the Hochschild, normalized, cyclic-quotient, connective, and
periodic-quotient variants; homology ranks come from fraction-free
elimination.

Sign conventions for tau: STANDARD uses (-1)^n per rotation (so the
(n+1)-fold composite is the identity and b descends to the quotient by
1-tau); PAPER uses (-1)^{n+1} (composite (-1)^{n+1} id), kept for
formula-level fidelity.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Chain
from .groups import (
    ConjClassId,
    GroupRealization,
    enumerate_tuples,
    tuple_total_length,
)
from .linalg import EchelonSpace, SparseMatrix, kernel_basis
from .scalars import Scalar, format_fraction


class Convention(enum.Enum):
    STANDARD = "standard"
    PAPER = "paper"

    def tau_sign(self, degree: int) -> int:
        if self is Convention.STANDARD:
            return -1 if degree % 2 else 1  # (-1)^n
        return 1 if degree % 2 else -1      # (-1)^{n+1}

    @classmethod
    def coerce(cls, value) -> "Convention":
        if isinstance(value, Convention):
            return value
        return cls(str(value))


VARIANTS = (
    "hochschild",
    "normalized",
    "cyclic-quotient",
    "connective-TC",
    "periodic-quotient",
)


# ----------------------------------------------------------------------
# chain operators
# ----------------------------------------------------------------------

def hochschild_b(x: Chain) -> Chain:
    """Alternating-face boundary; degree n -> n-1, defined for n >= 1."""
    n = x.degree
    if n == 0:
        raise ValueError("hochschild boundary needs degree >= 1")
    terms = []
    for tup, c in x.items():
        for i in range(n):
            merged = tup[:i] + (tup[i] * tup[i + 1],) + tup[i + 2:]
            terms.append((merged, c if i % 2 == 0 else -c))
        wrap = (tup[n] * tup[0],) + tup[1:n]
        terms.append((wrap, c if n % 2 == 0 else -c))
    return Chain(x.group, n - 1, terms)


def connes_B(x: Chain) -> Chain:
    """Degree-raising operator of the (b, B)-bicomplex.

    Both unit-insertion sums enter with sign (-1)^{ni}; this is the
    classical (1 - tau) s N form, the one that satisfies B*B = 0 and
    b*B + B*b = 0 exactly.
    """
    n = x.degree
    e = x.group.identity
    terms = []
    for tup, c in x.items():
        for i in range(n + 1):
            rot = tup[i:] + tup[:i]
            s = c if (n * i) % 2 == 0 else -c
            terms.append(((e,) + rot, s))
            terms.append(((rot[0], e) + rot[1:], s))
    return Chain(x.group, n + 1, terms)


def cyclic_tau(x: Chain, convention=Convention.STANDARD) -> Chain:
    """Signed cyclic rotation (last entry to the front)."""
    convention = Convention.coerce(convention)
    sign = convention.tau_sign(x.degree)
    terms = []
    for tup, c in x.items():
        terms.append(((tup[-1],) + tup[:-1], c if sign > 0 else -c))
    return Chain(x.group, x.degree, terms)


def normalize_chain(x: Chain) -> Chain:
    """Project to the normalized complex: drop tuples with a unit past slot 0."""
    terms = [
        (tup, c)
        for tup, c in x.items()
        if not any(g.is_identity for g in tup[1:])
    ]
    return Chain(x.group, x.degree, terms)


def tuple_conjugacy_class(tup) -> ConjClassId:
    """Class of the product g_0 g_1 ... g_n; the summand the tuple lives in."""
    prod = tup[0]
    for g in tup[1:]:
        prod = prod * g
    return prod.group.conjugacy_class_of(prod)


def conjugacy_split(x: Chain) -> dict[ConjClassId, Chain]:
    """Partition terms by conjugacy class of the tuple product."""
    buckets: dict[ConjClassId, list] = {}
    for tup, c in x.items():
        buckets.setdefault(tuple_conjugacy_class(tup), []).append((tup, c))
    return {
        cls: Chain(x.group, x.degree, terms) for cls, terms in buckets.items()
    }


def homogeneous_part(x: Chain) -> Chain:
    """The <e>-summand: terms whose tuple product is the identity."""
    split = conjugacy_split(x)
    for cls, part in split.items():
        if cls.is_identity_class:
            return part
    return Chain.zero(x.group, x.degree)


# ----------------------------------------------------------------------
# split-preservation and descent reports
# ----------------------------------------------------------------------

@dataclass
class CheckReport:
    checked: int
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "passed": self.passed,
            "violations": self.violations,
        }


def split_preservation_check(realization, degree, samples) -> CheckReport:
    """split . b = b . split and split . B = B . split, term-exact."""
    violations = []
    checked = 0
    for idx, x in enumerate(samples):
        if x.degree != degree:
            raise ValueError(f"sample {idx} has degree {x.degree}, expected {degree}")
        parts = conjugacy_split(x)
        resum = Chain.zero(x.group, x.degree)
        for part in parts.values():
            resum = resum + part
        if resum != x:
            violations.append({"sample": idx, "identity": "resum"})
        for op_name, op in (("b", hochschild_b), ("B", connes_B)):
            if op_name == "b" and degree == 0:
                continue
            direct = conjugacy_split(op(x))
            from_parts: dict = {}
            for cls, part in parts.items():
                for cls2, piece in conjugacy_split(op(part)).items():
                    if cls2 in from_parts:
                        from_parts[cls2] = from_parts[cls2] + piece
                    else:
                        from_parts[cls2] = piece
            from_parts = {c: p for c, p in from_parts.items() if not p.is_zero}
            if direct != from_parts:
                violations.append({"sample": idx, "identity": f"split∘{op_name}"})
        checked += 1
    return CheckReport(checked, violations)


def project_to_cyclic_quotient(x: Chain, convention=Convention.STANDARD) -> dict:
    """Coordinates of [x] in C/(1-tau): orbit reps -> transported coefficients.

    The kernel of this projection is exactly im(1-tau), so a zero result
    certifies membership there.
    """
    convention = Convention.coerce(convention)
    sign = convention.tau_sign(x.degree)
    out: dict = {}
    for tup, c in x.items():
        orbit = _orbit_info(tup, sign)
        if orbit is None:
            continue
        rep, transport = orbit
        coeff = out.get(rep, Scalar.zero()) + (c if transport > 0 else -c)
        if coeff.is_zero:
            out.pop(rep, None)
        else:
            out[rep] = coeff
    return out


def _orbit_info(tup, sign: int):
    """(canonical representative, transport sign) or None for a dead orbit."""
    n1 = len(tup)
    rots = []
    cur = tup
    for j in range(n1):
        rots.append(cur)
        cur = (cur[-1],) + cur[:-1]
    period = n1
    for j in range(1, n1):
        if rots[j] == tup:
            period = j
            break
    if sign < 0 and period % 2 == 1:
        return None  # transport around the orbit gives x = -x
    best_j = 0
    best_key = None
    for j in range(period):
        key = [g.sort_key for g in rots[j]]
        if best_key is None or key < best_key:
            best_key = key
            best_j = j
    transport = 1 if (sign > 0 or best_j % 2 == 0) else -1
    return rots[best_j], transport


def cyclic_descent_check(realization, degree, convention, samples) -> CheckReport:
    """b((1 - tau) x) must project to zero in the cyclic quotient."""
    convention = Convention.coerce(convention)
    violations = []
    checked = 0
    for idx, x in enumerate(samples):
        if x.degree != degree or degree < 1:
            raise ValueError("descent samples need the stated positive degree")
        y = x - cyclic_tau(x, convention)
        z = hochschild_b(y)
        if project_to_cyclic_quotient(z, convention):
            violations.append({"sample": idx})
        checked += 1
    return CheckReport(checked, violations)


# ----------------------------------------------------------------------
# truncated complexes
# ----------------------------------------------------------------------

@dataclass
class HomologyResult:
    variant: str
    degree: int
    radius: int
    kernel_rank: int
    image_rank: int
    dimension: int
    representatives: list | None = None

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "degree": self.degree,
            "R": self.radius,
            "kernel_rank": self.kernel_rank,
            "image_rank": self.image_rank,
            "dim": self.dimension,
        }


@dataclass
class TruncatedComplex:
    """Finite filtration stage with exact boundary matrices.

    Basis labels are bare tuples for single-column variants and (q, tuple)
    pairs for the connective and periodic variants (q = tensor degree of
    the column).  matrices[m] maps degree m to degree m-1.
    """

    realization: GroupRealization
    n_max: int
    radius: int
    variant: str
    convention: Convention
    k: int | None
    bases: dict = field(repr=False)
    matrices: dict = field(repr=False)
    notes: dict = field(default_factory=dict)

    def dimension(self, degree: int) -> int:
        return len(self.bases.get(degree, []))

    @property
    def dims(self) -> dict:
        return {m: len(b) for m, b in self.bases.items()}

    def index_of(self, degree: int) -> dict:
        return {label: i for i, label in enumerate(self.bases[degree])}

    def verify_d_squared(self) -> bool:
        for m in range(2, self.n_max + 1):
            if not self.matrices[m - 1].compose(self.matrices[m]).is_zero:
                return False
        return True

    def label_text(self, label) -> str:
        if self.variant in ("connective-TC", "periodic-quotient"):
            q, tup = label
            return f"q={q}|" + ",".join(g.name() for g in tup)
        return ",".join(g.name() for g in label)


def _tuple_bases(realization, n_max, radius, cap, normalized):
    bases = {}
    for n in range(n_max + 1):
        tups = enumerate_tuples(realization, n + 1, radius, cap=cap)
        if normalized:
            tups = [t for t in tups if not any(g.is_identity for g in t[1:])]
        bases[n] = tups
    return bases


def _chain_to_coords(x: Chain, index: dict, what: str) -> dict:
    out = {}
    for tup, c in x.items():
        i = index.get(tup)
        if i is None:
            raise RuntimeError(
                f"filtration closure violated: {what} left the truncated basis"
            )
        out[i] = c
    return out


def build_truncated(realization, n_max, radius, variant,
                    convention=Convention.STANDARD, k: int = 3,
                    cap=None) -> TruncatedComplex:
    """Assemble bases (total word length <= radius) and exact matrices."""
    convention = Convention.coerce(convention)
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if n_max < 0 or radius < 0:
        raise ValueError("n_max and radius must be nonnegative")
    notes: dict = {"convention": convention.value}
    if variant == "periodic-quotient":
        if k < 1:
            raise ValueError("periodic-quotient needs k >= 1")
        notes["k"] = k

    if variant in ("hochschild", "normalized"):
        bases = _tuple_bases(realization, n_max, radius, cap,
                             normalized=(variant == "normalized"))
        matrices = {}
        for m in range(1, n_max + 1):
            index = {t: i for i, t in enumerate(bases[m - 1])}
            cols = []
            for tup in bases[m]:
                out = hochschild_b(Chain.elementary(tup))
                if variant == "normalized":
                    out = normalize_chain(out)
                cols.append(_chain_to_coords(out, index, "b"))
            matrices[m] = SparseMatrix.from_columns(len(bases[m - 1]), cols)
        return TruncatedComplex(realization, n_max, radius, variant,
                                convention, None, bases, matrices, notes)

    if variant == "cyclic-quotient":
        raw = _tuple_bases(realization, n_max, radius, cap, normalized=False)
        bases = {}
        for n, tups in raw.items():
            sign = convention.tau_sign(n)
            reps = []
            seen = set()
            for t in tups:
                info = _orbit_info(t, sign)
                if info is None:
                    continue
                rep, _ = info
                if rep not in seen:
                    seen.add(rep)
                    reps.append(rep)
            bases[n] = reps
        if convention is Convention.PAPER:
            notes["descent_warning"] = (
                "b need not descend to the quotient under the paper sign"
            )
        matrices = {}
        for m in range(1, n_max + 1):
            index = {t: i for i, t in enumerate(bases[m - 1])}
            cols = []
            for rep in bases[m]:
                bx = hochschild_b(Chain.elementary(rep))
                coords = {}
                for tup, c in project_to_cyclic_quotient(bx, convention).items():
                    i = index.get(tup)
                    if i is None:
                        raise RuntimeError("filtration closure violated in quotient")
                    coords[i] = c
                cols.append(coords)
            matrices[m] = SparseMatrix.from_columns(len(bases[m - 1]), cols)
        return TruncatedComplex(realization, n_max, radius, variant,
                                convention, None, bases, matrices, notes)

    # multi-column variants share tuple bases per tensor degree; in the
    # full 2-periodic bicomplex the column degree q may exceed the total
    # degree (negative p), so the periodic variant ranges q over [0, k-1]
    max_q = n_max if variant == "connective-TC" else k - 1
    tuple_basis = {}
    for q in range(max_q + 1):
        tuple_basis[q] = enumerate_tuples(realization, q + 1, radius, cap=cap)
    tuple_index = {q: {t: i for i, t in enumerate(tb)}
                   for q, tb in tuple_basis.items()}

    if variant == "connective-TC":
        bases = {
            m: [(q, t) for q in range(m % 2, m + 1, 2) for t in tuple_basis[q]]
            for m in range(n_max + 1)
        }
        matrices = {}
        for m in range(1, n_max + 1):
            index = {lab: i for i, lab in enumerate(bases[m - 1])}
            cols = []
            for q, tup in bases[m]:
                coords: dict = {}
                if q >= 1:
                    for t2, c in hochschild_b(Chain.elementary(tup)).items():
                        _acc(coords, index, (q - 1, t2), c)
                if q <= m - 2:  # column p >= 1 has a B target inside TC
                    for t2, c in connes_B(Chain.elementary(tup)).items():
                        _acc(coords, index, (q + 1, t2), c)
                cols.append(coords)
            matrices[m] = SparseMatrix.from_columns(len(bases[m - 1]), cols)
        return TruncatedComplex(realization, n_max, radius, variant,
                                convention, None, bases, matrices, notes)

    # periodic-quotient(k): columns q < k; top column modded by b(Omega^k)
    top = k - 1
    image = EchelonSpace()
    for tup in enumerate_tuples(realization, k + 1, radius, cap=cap):
        bx = hochschild_b(Chain.elementary(tup))
        image.add(_chain_to_coords(bx, tuple_index[top], "b(Omega^k)"))
    pivot = image.leading_indices()
    top_labels = [t for i, t in enumerate(tuple_basis[top]) if i not in pivot]
    rev_top = {i: t for i, t in enumerate(tuple_basis[top])}
    notes["top_quotient_rank"] = image.rank

    def column_labels(q):
        if q == top:
            return [(q, t) for t in top_labels]
        return [(q, t) for t in tuple_basis[q]]

    bases = {
        m: [lab for q in range(m % 2, k, 2) for lab in column_labels(q)]
        for m in range(n_max + 1)
    }

    def project_top(chain: Chain) -> dict:
        coords = _chain_to_coords(chain, tuple_index[top], "into top column")
        return image.reduce_fully(coords)

    matrices = {}
    for m in range(1, n_max + 1):
        index = {lab: i for i, lab in enumerate(bases[m - 1])}
        cols = []
        for q, tup in bases[m]:
            coords: dict = {}
            if q >= 1:  # b lands in q-1 <= k-2, never needs the top projection
                for t2, c in hochschild_b(Chain.elementary(tup)).items():
                    _acc(coords, index, (q - 1, t2), c)
            target = q + 1
            if target <= top:
                Bx = connes_B(Chain.elementary(tup))
                if target == top:
                    for i, c in project_top(Bx).items():
                        _acc(coords, index, (top, rev_top[i]), c)
                else:
                    for t2, c in Bx.items():
                        _acc(coords, index, (target, t2), c)
            cols.append(coords)
        matrices[m] = SparseMatrix.from_columns(len(bases[m - 1]), cols)
    return TruncatedComplex(realization, n_max, radius, variant,
                            convention, k, bases, matrices, notes)


def _acc(coords: dict, index: dict, label, c: Scalar):
    i = index.get(label)
    if i is None:
        raise RuntimeError("filtration closure violated in column assembly")
    s = coords.get(i, Scalar.zero()) + c
    if s.is_zero:
        coords.pop(i, None)
    else:
        coords[i] = s


def truncated_homology(cx: TruncatedComplex, degree: int,
                       with_representatives: bool = False) -> HomologyResult:
    """Exact kernel/image ranks at the given degree."""
    if degree < 0 or degree + 1 > cx.n_max:
        raise ValueError(
            f"degree {degree} out of range: need 0 <= degree <= {cx.n_max - 1}"
        )
    dim = cx.dimension(degree)
    if degree == 0:
        kernel_rank = dim
    else:
        kernel_rank = dim - cx.matrices[degree].rank()
    image_rank = cx.matrices[degree + 1].rank()
    result = HomologyResult(
        cx.variant, degree, cx.radius, kernel_rank, image_rank,
        kernel_rank - image_rank,
    )
    if with_representatives:
        result.representatives = _representatives(cx, degree, result.dimension)
    return result


def _representatives(cx, degree, dimension) -> list:
    if dimension == 0:
        return []
    if degree == 0:
        kernel = [{i: Scalar.one()} for i in range(cx.dimension(0))]
    else:
        kernel = kernel_basis(cx.matrices[degree])
    span = EchelonSpace()
    for col in cx.matrices[degree + 1].columns():
        span.add(col)
    labels = cx.bases[degree]
    reps = []
    for vec in kernel:
        residual = span.reduce(vec)
        if residual and span.add(vec):
            reps.append({labels[i]: v for i, v in vec.items()})
            if len(reps) == dimension:
                break
    return reps


def representative_chains(cx: TruncatedComplex, result: HomologyResult) -> list:
    """Representatives as Chains, for the single-column variants."""
    if cx.variant not in ("hochschild", "normalized", "cyclic-quotient"):
        raise ValueError("representative chains need a tuple-basis variant")
    if result.representatives is None:
        raise ValueError("homology was computed without representatives")
    return [
        Chain(cx.realization, result.degree, list(rep.items()))
        for rep in result.representatives
    ]


# ----------------------------------------------------------------------
# export
# ----------------------------------------------------------------------

def export_complex(cx: TruncatedComplex, directory):
    os.makedirs(directory, exist_ok=True)
    meta = {
        "group": cx.realization.describe(),
        "variant": cx.variant,
        "convention": cx.convention.value,
        "n_max": cx.n_max,
        "R": cx.radius,
        "dims": {str(m): d for m, d in sorted(cx.dims.items())},
    }
    if cx.k is not None:
        meta["k"] = cx.k
    with open(os.path.join(directory, "complex.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")
    for m, basis in sorted(cx.bases.items()):
        with open(os.path.join(directory, f"basis_{m}.txt"), "w", encoding="utf-8") as fh:
            for label in basis:
                fh.write(cx.label_text(label) + "\n")
    for m, mat in sorted(cx.matrices.items()):
        with open(os.path.join(directory, f"matrix_{m}.txt"), "w", encoding="utf-8") as fh:
            fh.write(f"{mat.rows} {mat.cols}\n")
            for (r, c) in sorted(mat.entries):
                v = mat.entries[(r, c)]
                fh.write(
                    f"{r} {c} {format_fraction(v.re)} {format_fraction(v.im)}\n"
                )
