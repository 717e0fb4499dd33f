"""Group-algebra elements, tensor chains, and norms/seminorms on them.

AlgebraElement is a finitely supported map from group elements to exact
complex-rational coefficients; Chain is its degree-n tensor analogue with
(n+1)-tuples as keys.  The norm layer provides the weighted l^1 values
nu_lambda (exact), the reduced C*-norm for finite-table and free-abelian
realizations (approximate with certified error bounds), the unconditional
majorant ||f||_max = |||f|||_r, and unconditionality checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import (
    FiniteTableGroup,
    FreeAbelianGroup,
    GroupElement,
    GroupRealization,
    ResourceCapExceeded,
    tuple_total_length,
)
from .scalars import (
    DEFAULT_ABS_WIDTH,
    Enclosure,
    Scalar,
    enclosure_sum,
    format_scalar,
    parse_scalar,
)


class InexactModulusError(ValueError):
    """A coefficient modulus is irrational and an exact value was demanded."""


class UnsupportedRealizationError(ValueError):
    """The operation is not available for this realization kind."""


def _coerce_terms(terms) -> dict:
    collected: dict = {}
    for key, value in terms:
        value = Scalar.coerce(value)
        if key in collected:
            value = collected[key] + value
        if value.is_zero:
            collected.pop(key, None)
        else:
            collected[key] = value
    return collected


class AlgebraElement:
    """Finitely supported element of C[pi]; no zero coefficients stored."""

    __slots__ = ("group", "_terms")

    def __init__(self, group: GroupRealization, terms=()):
        self.group = group
        self._terms = _coerce_terms(
            terms.items() if isinstance(terms, dict) else terms
        )
        for g in self._terms:
            if not isinstance(g, GroupElement) or g.group is not group:
                raise ValueError(f"term key {g!r} not an element of {group.name}")

    @classmethod
    def zero(cls, group) -> "AlgebraElement":
        return cls(group)

    @classmethod
    def delta(cls, g: GroupElement, coeff=1) -> "AlgebraElement":
        return cls(g.group, [(g, Scalar.coerce(coeff))])

    def coefficient(self, g: GroupElement) -> Scalar:
        return self._terms.get(g, Scalar.zero())

    def support(self) -> list[GroupElement]:
        return sorted(self._terms, key=lambda g: g.sort_key)

    def items_sorted(self) -> list[tuple[GroupElement, Scalar]]:
        return [(g, self._terms[g]) for g in self.support()]

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same(other)
        return AlgebraElement(
            self.group, list(self._terms.items()) + list(other._terms.items())
        )

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.group, [(g, -v) for g, v in self._terms.items()])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scaled(self, c) -> "AlgebraElement":
        c = Scalar.coerce(c)
        return AlgebraElement(self.group, [(g, c * v) for g, v in self._terms.items()])

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return convolve(self, other)

    def _check_same(self, other):
        if not isinstance(other, AlgebraElement) or other.group is not self.group:
            raise ValueError("operands live in different realizations")

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.group is other.group and self._terms == other._terms

    def __hash__(self):
        return hash((id(self.group), frozenset(self._terms.items())))

    def __repr__(self):
        if self.is_zero:
            return "AlgebraElement(0)"
        body = " + ".join(f"({v})·{g.name()}" for g, v in self.items_sorted())
        return f"AlgebraElement({body})"


def convolve(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Product in C[pi]: (sum a_g g)(sum b_h h) = sum a_g b_h (gh)."""
    x._check_same(y)
    terms = []
    for g, a in x._terms.items():
        for h, b in y._terms.items():
            terms.append((g * h, a * b))
    return AlgebraElement(x.group, terms)


class Chain:
    """Degree-n element of the group-algebra tensor complex.

    Keys are (n+1)-tuples of group elements; coefficients are exact and
    nonzero.
    """

    __slots__ = ("group", "degree", "_terms")

    def __init__(self, group: GroupRealization, degree: int, terms=()):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        self.group = group
        self.degree = degree
        self._terms = _coerce_terms(
            terms.items() if isinstance(terms, dict) else terms
        )
        for tup in self._terms:
            if len(tup) != degree + 1:
                raise ValueError(f"tuple {tup!r} has wrong arity for degree {degree}")
            for g in tup:
                if not isinstance(g, GroupElement) or g.group is not group:
                    raise ValueError(f"{g!r} is not an element of {group.name}")

    @classmethod
    def zero(cls, group, degree: int) -> "Chain":
        return cls(group, degree)

    @classmethod
    def elementary(cls, tup, coeff=1) -> "Chain":
        tup = tuple(tup)
        if not tup:
            raise ValueError("empty tuple")
        return cls(tup[0].group, len(tup) - 1, [(tup, Scalar.coerce(coeff))])

    def coefficient(self, tup) -> Scalar:
        return self._terms.get(tuple(tup), Scalar.zero())

    def support(self) -> list[tuple]:
        return sorted(
            self._terms,
            key=lambda t: (tuple_total_length(t), [g.sort_key for g in t]),
        )

    def items_sorted(self):
        return [(t, self._terms[t]) for t in self.support()]

    def items(self):
        return self._terms.items()

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def max_total_length(self) -> int:
        if self.is_zero:
            return 0
        return max(tuple_total_length(t) for t in self._terms)

    def _check_same(self, other):
        if (
            not isinstance(other, Chain)
            or other.group is not self.group
            or other.degree != self.degree
        ):
            raise ValueError("chain operands differ in realization or degree")

    def __add__(self, other: "Chain") -> "Chain":
        self._check_same(other)
        return Chain(
            self.group, self.degree,
            list(self._terms.items()) + list(other._terms.items()),
        )

    def __neg__(self) -> "Chain":
        return Chain(self.group, self.degree,
                     [(t, -v) for t, v in self._terms.items()])

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scaled(self, c) -> "Chain":
        c = Scalar.coerce(c)
        return Chain(self.group, self.degree,
                     [(t, c * v) for t, v in self._terms.items()])

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return (
            self.group is other.group
            and self.degree == other.degree
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((id(self.group), self.degree, frozenset(self._terms.items())))

    def __repr__(self):
        if self.is_zero:
            return f"Chain(deg={self.degree}, 0)"
        body = " + ".join(
            f"({v})·({', '.join(g.name() for g in t)})" for t, v in self.items_sorted()
        )
        return f"Chain(deg={self.degree}: {body})"


@dataclass(frozen=True)
class NormParams:
    """Weight parameters: lambda >= 1 for l^1_lambda, N >= 1 and m >= 0."""

    lam: Fraction = Fraction(1)
    N: Fraction = Fraction(1)
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "N", Fraction(self.N))
        if self.lam < 1:
            raise ValueError("lambda must be >= 1")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.m < 0:
            raise ValueError("m must be >= 0")


# ----------------------------------------------------------------------
# weighted l^1 seminorms
# ----------------------------------------------------------------------

def _abs_enclosures(coeffs, width) -> list[Enclosure]:
    return [c.abs_enclosure(width) for c in coeffs]


def nu_lambda(x: AlgebraElement, lam, width: Fraction = DEFAULT_ABS_WIDTH) -> Enclosure:
    """nu_lambda(x) = sum |coeff_g| lambda^{L(g)}; exact when moduli are."""
    lam = Fraction(lam)
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    parts = []
    for g, v in x.items_sorted():
        parts.append(v.abs_enclosure(width).scaled(lam ** g.word_length()))
    return enclosure_sum(parts)


def abs_coefficients(x: AlgebraElement) -> AlgebraElement:
    """|x| = sum |coeff_g| g; raises InexactModulusError when irrational."""
    terms = []
    for g, v in x._terms.items():
        mod = v.abs_exact()
        if mod is None:
            raise InexactModulusError(
                f"coefficient {v} of {g.name()} has irrational modulus"
            )
        terms.append((g, Scalar(mod)))
    return AlgebraElement(x.group, terms)


# ----------------------------------------------------------------------
# reduced C*-norm (finite-table and free-abelian only)
# ----------------------------------------------------------------------

_FP_EPS = Fraction(1, 10**12)
_GRID_POINT_CAP = 50_000_000
_PI_UPPER = Fraction(355, 113)  # > pi, keeps the Lipschitz bound rigorous


def _regular_representation(x: AlgebraElement, widths_out: list) -> np.ndarray:
    group: FiniteTableGroup = x.group
    n = group.order
    mat = np.zeros((n, n), dtype=np.complex128)
    for g, v in x._terms.items():
        gi = g.key
        for h in range(n):
            mat[group.table[gi][h], h] += complex(v)
    widths_out.append(Fraction(0))
    return mat


def _regular_representation_abs(x: AlgebraElement, widths_out: list) -> np.ndarray:
    group: FiniteTableGroup = x.group
    n = group.order
    mat = np.zeros((n, n), dtype=np.complex128)
    total_w = Fraction(0)
    for g, v in x._terms.items():
        enc = v.abs_enclosure(DEFAULT_ABS_WIDTH)
        total_w += enc.width
        gi = g.key
        for h in range(n):
            mat[group.table[gi][h], h] += float(enc.midpoint)
    widths_out.append(total_w)
    return mat


def _finite_operator_norm(mat: np.ndarray, extra: Fraction, nu1_hi: Fraction) -> Enclosure:
    n = mat.shape[0]
    sigma = float(np.linalg.svd(mat, compute_uv=False)[0]) if n else 0.0
    scale = max(1.0, sigma)
    eps = Fraction(float((16 + n) * 2.3e-16 * scale)) + _FP_EPS + extra
    lo = max(Fraction(0), Fraction(sigma) - eps)
    hi = min(Fraction(sigma) + eps, nu1_hi)
    if hi < lo:
        lo = hi
    return Enclosure(lo, hi)


def _torus_sup(x: AlgebraElement, resolution: int, moduli: bool) -> Enclosure:
    """Sup of |fourier transform| over a torus grid, with a Lipschitz bound.

    Grid step is 2*pi/resolution per coordinate, so every torus point is
    within pi/resolution of a grid point in each angle; |f| then deviates
    by at most lip1 * pi/resolution where lip1 = sum |coeff| * ||v||_1.
    """
    group: FreeAbelianGroup = x.group
    k = group.rank
    if resolution < 1:
        raise ValueError("resolution must be positive")
    if resolution**k > _GRID_POINT_CAP:
        raise ResourceCapExceeded(
            f"torus grid {resolution}^{k} exceeds {_GRID_POINT_CAP} points"
        )
    coeffs = []
    lip1_hi = Fraction(0)
    nu1 = Enclosure.exact(0)
    mod_width = Fraction(0)
    for g, v in x.items_sorted():
        enc = v.abs_enclosure(DEFAULT_ABS_WIDTH)
        mod_width += enc.width
        nu1 = nu1 + enc
        lip1_hi += enc.hi * g.word_length()
        c = float(enc.midpoint) if moduli else complex(v)
        coeffs.append((g.key, c))
    if not coeffs:
        return Enclosure.exact(0)

    theta = 2.0 * np.pi * np.arange(resolution) / resolution
    if k == 1:
        f = np.zeros(resolution, dtype=np.complex128)
        for (v,), c in coeffs:
            f += c * np.exp(1j * v * theta)
        best = float(np.max(np.abs(f)))
    else:
        from itertools import product as iproduct

        best = 0.0
        inner = theta  # vectorized last axis
        for outer in iproduct(range(resolution), repeat=k - 1):
            f = np.zeros(resolution, dtype=np.complex128)
            for vec, c in coeffs:
                phase = sum(vec[d] * theta[outer[d]] for d in range(k - 1))
                f += (c * np.exp(1j * phase)) * np.exp(1j * vec[k - 1] * inner)
            m = float(np.max(np.abs(f)))
            if m > best:
                best = m
    lip_err = lip1_hi * _PI_UPPER / resolution
    feps = _FP_EPS * (1 + len(coeffs)) + mod_width
    lo = max(Fraction(0), Fraction(best) - feps)
    hi = min(Fraction(best) + lip_err + feps, nu1.hi)
    return Enclosure(lo, max(lo, hi))


def default_torus_resolution(x: AlgebraElement, target_width: Fraction) -> int:
    """Resolution making the Lipschitz term about half of target_width."""
    import math as _math

    lip1 = Fraction(0)
    for g, v in x._terms.items():
        lip1 += v.abs_enclosure(DEFAULT_ABS_WIDTH).hi * g.word_length()
    if lip1 == 0:
        return 8
    return int(_math.ceil(float(2 * lip1 * _PI_UPPER / Fraction(target_width)))) + 1


def reduced_norm(x: AlgebraElement, resolution: int | None = None,
                 target_width=None) -> Enclosure:
    """Operator norm of x on l^2 via the left regular representation.

    Finite-table groups take the dense eigen route; Z^k is evaluated on a
    torus grid with an attached Lipschitz error bound.  Free groups are
    unsupported.
    """
    group = x.group
    nu1 = nu_lambda(x, 1)
    if isinstance(group, FiniteTableGroup):
        widths: list = []
        mat = _regular_representation(x, widths)
        return _finite_operator_norm(mat, widths[0], nu1.hi)
    if isinstance(group, FreeAbelianGroup):
        if resolution is None:
            tw = Fraction(target_width) if target_width is not None else Fraction(1, 10**4)
            resolution = default_torus_resolution(x, tw)
        return _torus_sup(x, resolution, moduli=False)
    raise UnsupportedRealizationError(
        f"reduced norm not computable for realization kind {group.kind!r}"
    )


def amax_seminorm(x: AlgebraElement, resolution: int | None = None,
                  target_width=None) -> Enclosure:
    """||x||_max = || |x| ||_r: reduced norm of the coefficientwise modulus."""
    group = x.group
    try:
        ax = abs_coefficients(x)
    except InexactModulusError:
        ax = None
    if ax is not None:
        return reduced_norm(ax, resolution=resolution, target_width=target_width)
    # irrational moduli: midpoint matrices with widened error terms
    if isinstance(group, FiniteTableGroup):
        widths: list = []
        mat = _regular_representation_abs(x, widths)
        return _finite_operator_norm(mat, widths[0], nu_lambda(x, 1).hi)
    if isinstance(group, FreeAbelianGroup):
        if resolution is None:
            tw = Fraction(target_width) if target_width is not None else Fraction(1, 10**4)
            resolution = default_torus_resolution(x, tw)
        return _torus_sup(x, resolution, moduli=True)
    raise UnsupportedRealizationError(
        f"max seminorm not computable for realization kind {group.kind!r}"
    )


# ----------------------------------------------------------------------
# unconditionality checks (Lafforgue-style conditions)
# ----------------------------------------------------------------------

@dataclass
class UnconditionalityRecord:
    sample: int
    check: str  # "absolute-value" or "domination"
    outcome: str  # "pass", "violation", "indeterminate"
    detail: str

    def to_json(self) -> dict:
        return {
            "sample": self.sample,
            "check": self.check,
            "outcome": self.outcome,
            "detail": self.detail,
        }


@dataclass
class UnconditionalityReport:
    seminorm: str
    records: list
    passed: bool

    def violations(self) -> list:
        return [r for r in self.records if r.outcome == "violation"]

    def to_json(self) -> dict:
        return {
            "seminorm": self.seminorm,
            "passed": self.passed,
            "records": [r.to_json() for r in self.records],
        }


def _seminorm_value(name: str, x: AlgebraElement, lam, resolution) -> Enclosure:
    if name == "nu":
        return nu_lambda(x, lam if lam is not None else 1)
    if name == "amax":
        return amax_seminorm(x, resolution=resolution)
    if name == "reduced":
        return reduced_norm(x, resolution=resolution)
    raise ValueError(f"unknown seminorm {name!r}")


def _dominates(x: AlgebraElement, xp: AlgebraElement) -> bool:
    """|coeff of x| <= |coeff of xp| pointwise, compared exactly via squares."""
    for g, v in x._terms.items():
        w = xp.coefficient(g)
        if v.abs_squared() > w.abs_squared():
            return False
    return True


def check_unconditional(seminorm: str, samples, lam=None,
                        resolution: int | None = None) -> UnconditionalityReport:
    """Test eta(x) = eta(|x|) and domination monotonicity on sample pairs.

    `samples` is a list of (x, x') pairs with |coeff x| <= |coeff x'|
    pointwise (a precondition, validated here).  Violations are report
    content; indeterminate outcomes record enclosures too wide to decide.
    """
    records = []
    for idx, (x, xp) in enumerate(samples):
        if not _dominates(x, xp):
            raise ValueError(f"sample {idx} violates the domination precondition")
        # (a) coefficientwise absolute values leave the seminorm unchanged
        vx = _seminorm_value(seminorm, x, lam, resolution)
        try:
            ax = abs_coefficients(x)
            vax = _seminorm_value(seminorm, ax, lam, resolution)
        except InexactModulusError:
            vax = None
        if vax is None:
            records.append(UnconditionalityRecord(
                idx, "absolute-value", "indeterminate",
                "irrational modulus; no exact |x| representative"))
        elif vx == vax:
            records.append(UnconditionalityRecord(idx, "absolute-value", "pass", ""))
        elif vx.definitely_lt(vax) or vax.definitely_lt(vx):
            records.append(UnconditionalityRecord(
                idx, "absolute-value", "violation",
                f"eta(x)={_enc_str(vx)} vs eta(|x|)={_enc_str(vax)}"))
        else:
            records.append(UnconditionalityRecord(
                idx, "absolute-value", "pass",
                f"overlapping enclosures {_enc_str(vx)} ~ {_enc_str(vax)}"))
        # (b) monotonicity under coefficientwise domination
        vxp = _seminorm_value(seminorm, xp, lam, resolution)
        if vx.possibly_le(vxp):
            records.append(UnconditionalityRecord(idx, "domination", "pass", ""))
        else:
            records.append(UnconditionalityRecord(
                idx, "domination", "violation",
                f"eta(x)={_enc_str(vx)} > eta(x')={_enc_str(vxp)}"))
    passed = all(r.outcome != "violation" for r in records)
    return UnconditionalityReport(seminorm, records, passed)


def _enc_str(e: Enclosure) -> str:
    if e.is_exact:
        return str(e.lo)
    return f"[{float(e.lo):.9g},{float(e.hi):.9g}]"


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def algebra_element_to_json(x: AlgebraElement) -> dict:
    return {
        "group": x.group.name,
        "terms": [
            {"element": g.name(), "scalar": format_scalar(v)}
            for g, v in x.items_sorted()
        ],
    }


def algebra_element_from_json(doc: dict, group: GroupRealization) -> AlgebraElement:
    terms = [
        (group.parse_element(t["element"]), parse_scalar(t["scalar"]))
        for t in doc["terms"]
    ]
    return AlgebraElement(group, terms)


def chain_to_json(x: Chain) -> dict:
    return {
        "group": x.group.name,
        "degree": x.degree,
        "terms": [
            {"tuple": [g.name() for g in t], "scalar": format_scalar(v)}
            for t, v in x.items_sorted()
        ],
    }


def chain_from_json(doc: dict, group: GroupRealization) -> Chain:
    terms = [
        (
            tuple(group.parse_element(s) for s in t["tuple"]),
            parse_scalar(t["scalar"]),
        )
        for t in doc["terms"]
    ]
    return Chain(group, int(doc["degree"]), terms)


def write_chain_file(path, x: Chain):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(chain_to_json(x), fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_chain_file(path, group: GroupRealization) -> Chain:
    with open(path, "r", encoding="utf-8") as fh:
        return chain_from_json(json.load(fh), group)


def enclosure_to_json(e: Enclosure) -> dict:
    if e.is_exact:
        return {"exactness": "exact", "value": _frac_str(e.lo)}
    return {
        "exactness": f"enclosure({_frac_str(e.width)})",
        "lo": _frac_str(e.lo),
        "hi": _frac_str(e.hi),
        "float": float(e.midpoint),
    }


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
