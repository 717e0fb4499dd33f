"""Bar-complex cochains, growth classification, and eta seminorms.

A cochain of arity n is an evaluable map pi^n -> C.  The growth scanner
fits, for each lambda in a grid, the smallest constant bounding
|phi(g_1..g_n)| by lambda^{sum L(g_i)} over a radius schedule, and
classifies the outcome.  Subexponential membership is a statement over
all lambda > 1 and is never decided at finite radius: the classifier
reports "subexponential-consistent" at best.

The eta seminorms weight a degree-n chain by
(1/c(n)!) (2+2c(n))^m N^{-c(n)} with c(2n) = c(2n+1) = n, on top of the
lambda-weighted l^1 norm of the coefficients; on finitely supported
chains this is the largest seminorm dominated by the stated bound on
elementary tensors, with equality on the group basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .algebra import Chain, NormParams
from .groups import (
    FreeAbelianGroup,
    FreeGroup,
    GroupElement,
    GroupRealization,
    enumerate_tuples,
    tuple_total_length,
)
from .scalars import Enclosure, Scalar, enclosure_max, enclosure_sum, parse_scalar


class Cochain:
    """Evaluable map pi^n -> C with an optional normalization flag."""

    def __init__(self, group: GroupRealization, arity: int, evaluator,
                 normalized: bool = False, name: str = "cochain"):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        self.group = group
        self.arity = arity
        self.evaluator = evaluator
        self.normalized = normalized
        self.name = name

    def __call__(self, args) -> Scalar:
        args = tuple(args)
        if len(args) != self.arity:
            raise ValueError(f"{self.name} expects {self.arity} arguments")
        for g in args:
            if not isinstance(g, GroupElement) or g.group is not self.group:
                raise ValueError("argument outside the cochain's realization")
        return Scalar.coerce(self.evaluator(args))

    def __repr__(self):
        flag = ", normalized" if self.normalized else ""
        return f"Cochain({self.name!r}, arity={self.arity}{flag})"


def bar_coboundary(phi: Cochain) -> Cochain:
    """Inhomogeneous bar coboundary; arity n -> n+1.

    (d phi)(g_1..g_{n+1}) = phi(g_2..g_{n+1})
        + sum_i (-1)^i phi(.., g_i g_{i+1}, ..) + (-1)^{n+1} phi(g_1..g_n).
    Normalized cochains stay normalized.
    """
    n = phi.arity

    def evaluate(args):
        total = phi(args[1:])
        for i in range(1, n + 1):
            merged = args[:i - 1] + (args[i - 1] * args[i],) + args[i + 1:]
            v = phi(merged)
            total = total + (v if i % 2 == 0 else -v)
        v = phi(args[:n])
        total = total + (v if (n + 1) % 2 == 0 else -v)
        return total

    return Cochain(phi.group, n + 1, evaluate,
                   normalized=phi.normalized, name=f"d({phi.name})")


def normalize_cochain(phi: Cochain) -> Cochain:
    """Force zero on degenerate tuples (any argument the identity)."""

    def evaluate(args):
        if any(g.is_identity for g in args):
            return Scalar.zero()
        return phi(args)

    return Cochain(phi.group, phi.arity, evaluate,
                   normalized=True, name=f"norm({phi.name})")


# ----------------------------------------------------------------------
# built-in cochain families
# ----------------------------------------------------------------------

def zero_cochain(group, arity: int) -> Cochain:
    return Cochain(group, arity, lambda args: Scalar.zero(),
                   normalized=True, name="zero")


def homomorphism_cochain(group, values: dict) -> Cochain:
    """Arity-1 cochain from generator values; free or free-abelian only."""
    if not isinstance(group, (FreeGroup, FreeAbelianGroup)):
        raise ValueError("homomorphism cochains need a free or free-abelian group")
    vals = [Scalar.coerce(values.get(ch, 0)) for ch in group.letters]

    if isinstance(group, FreeAbelianGroup):
        def evaluate(args):
            total = Scalar.zero()
            for i, a in enumerate(args[0].key):
                total = total + vals[i] * Scalar(a)
            return total
    else:
        def evaluate(args):
            total = Scalar.zero()
            for s in args[0].key:
                v = vals[abs(s) - 1]
                total = total + (v if s > 0 else -v)
            return total

    return Cochain(group, 1, evaluate, normalized=True, name="homomorphism")


def length_power_cochain(group, power: int) -> Cochain:
    if power < 0:
        raise ValueError("power must be nonnegative")

    def evaluate(args):
        return Scalar(Fraction(args[0].word_length() ** power))

    return Cochain(group, 1, evaluate, normalized=power > 0,
                   name=f"length^{power}")


def indicator_cochain(group, element: GroupElement) -> Cochain:
    def evaluate(args):
        return Scalar.one() if args[0] == element else Scalar.zero()

    return Cochain(group, 1, evaluate,
                   normalized=not element.is_identity,
                   name=f"indicator[{element.name()}]")


def exp_length_cochain(group, base) -> Cochain:
    """Normalized exponential-length cochain: base^{L(g)} off the identity."""
    base = Fraction(base)
    if base <= 0:
        raise ValueError("base must be positive")

    def evaluate(args):
        g = args[0]
        if g.is_identity:
            return Scalar.zero()
        return Scalar(base ** g.word_length())

    return Cochain(group, 1, evaluate, normalized=True, name=f"exp{base}^L")


def area_cochain(group) -> Cochain:
    """The antisymmetric form c(g,h) = g1 h2 - g2 h1 on Z^2 (a 2-cocycle)."""
    if not isinstance(group, FreeAbelianGroup) or group.rank != 2:
        raise ValueError("area cochain lives on Z^2")

    def evaluate(args):
        g, h = args[0].key, args[1].key
        return Scalar(Fraction(g[0] * h[1] - g[1] * h[0]))

    return Cochain(group, 2, evaluate, normalized=True, name="area")


def determinant_cochain(group) -> Cochain:
    """det of the k stacked vectors on Z^k; the top-degree k-cocycle."""
    if not isinstance(group, FreeAbelianGroup):
        raise ValueError("determinant cochain lives on Z^k")
    k = group.rank

    def evaluate(args):
        rows = [g.key for g in args]
        total = 0
        for perm in permutations(range(k)):
            sign = _perm_sign(perm)
            prod = 1
            for i in range(k):
                prod *= rows[i][perm[i]]
            total += sign * prod
        return Scalar(Fraction(total))

    return Cochain(group, k, evaluate, normalized=True, name="determinant")


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sum_cochain(parts) -> Cochain:
    parts = list(parts)
    _check_combinable(parts)

    def evaluate(args):
        total = Scalar.zero()
        for p in parts:
            total = total + p(args)
        return total

    return Cochain(parts[0].group, parts[0].arity, evaluate,
                   normalized=all(p.normalized for p in parts), name="sum")


def product_cochain(parts) -> Cochain:
    parts = list(parts)
    _check_combinable(parts)

    def evaluate(args):
        total = Scalar.one()
        for p in parts:
            total = total * p(args)
        return total

    return Cochain(parts[0].group, parts[0].arity, evaluate,
                   normalized=any(p.normalized for p in parts), name="product")


def _check_combinable(parts):
    if not parts:
        raise ValueError("need at least one part")
    group, arity = parts[0].group, parts[0].arity
    for p in parts[1:]:
        if p.group is not group or p.arity != arity:
            raise ValueError("cochain parts must share group and arity")


def load_cochain(doc: dict, group: GroupRealization) -> Cochain:
    """Build a cochain from a definition document (exact rational params)."""
    kind = doc.get("kind")
    if kind == "zero":
        return zero_cochain(group, int(doc.get("arity", 1)))
    if kind == "homomorphism":
        values = {k: parse_scalar(str(v)) for k, v in doc.get("values", {}).items()}
        return homomorphism_cochain(group, values)
    if kind == "length-power":
        return length_power_cochain(group, int(doc["power"]))
    if kind == "indicator":
        return indicator_cochain(group, group.parse_element(doc["element"]))
    if kind == "exp-length":
        return exp_length_cochain(group, Fraction(str(doc["base"])))
    if kind == "area":
        return area_cochain(group)
    if kind == "determinant":
        return determinant_cochain(group)
    if kind in ("sum", "product"):
        parts = [load_cochain(p, group) for p in doc["parts"]]
        return sum_cochain(parts) if kind == "sum" else product_cochain(parts)
    if kind == "coboundary":
        return bar_coboundary(load_cochain(doc["of"], group))
    raise ValueError(f"unknown cochain kind {kind!r}")


def cochain_catalog() -> list[dict]:
    return [
        {"kind": "zero", "params": {"arity": "int >= 0"}},
        {"kind": "homomorphism", "params": {"values": "letter -> rational"},
         "groups": "free, free-abelian"},
        {"kind": "length-power", "params": {"power": "int >= 0"}},
        {"kind": "indicator", "params": {"element": "element text"}},
        {"kind": "exp-length", "params": {"base": "rational > 0"}},
        {"kind": "area", "params": {}, "groups": "Z^2"},
        {"kind": "determinant", "params": {}, "groups": "Z^k"},
        {"kind": "sum", "params": {"parts": "[cochain docs]"}},
        {"kind": "product", "params": {"parts": "[cochain docs]"}},
        {"kind": "coboundary", "params": {"of": "cochain doc"}},
    ]


# ----------------------------------------------------------------------
# growth classification
# ----------------------------------------------------------------------

@dataclass
class GrowthReport:
    cochain: str
    group: str
    arity: int
    lambdas: list
    radii: list
    table: dict  # (lambda, R) -> Enclosure
    exact: bool
    classification: dict

    def value(self, lam, radius) -> Enclosure:
        return self.table[(Fraction(lam), radius)]

    def to_csv_rows(self) -> list[tuple[str, str, str]]:
        rows = []
        for lam in self.lambdas:
            for r in self.radii:
                enc = self.table[(lam, r)]
                val = _frac_text(enc.lo) if enc.is_exact else \
                    f"{_frac_text(enc.lo)}..{_frac_text(enc.hi)}"
                rows.append((_frac_text(lam), str(r), val))
        return rows

    def to_json(self) -> dict:
        return {
            "cochain": self.cochain,
            "group": self.group,
            "arity": self.arity,
            "lambdas": [_frac_text(l) for l in self.lambdas],
            "radii": list(self.radii),
            "exact": self.exact,
            "classification": self.classification,
            "table": [
                {"lambda": _frac_text(lam), "R": r,
                 "C": _frac_text(self.table[(lam, r)].lo) if self.table[(lam, r)].is_exact
                 else {"lo": _frac_text(self.table[(lam, r)].lo),
                       "hi": _frac_text(self.table[(lam, r)].hi)}}
                for lam in self.lambdas for r in self.radii
            ],
        }


def _frac_text(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


DEFAULT_LAMBDA_GRID = (Fraction(2), Fraction(3, 2), Fraction(5, 4), Fraction(9, 8))
DEFAULT_RADIUS_SCHEDULE = (4, 6, 8, 10)
_POLY_DEGREE_RANGE = range(0, 7)


def growth_fit(phi: Cochain, lambdas=DEFAULT_LAMBDA_GRID,
               radii=DEFAULT_RADIUS_SCHEDULE, cap=None) -> GrowthReport:
    """Fit C_lambda(R) = max |phi| * lambda^{-sum L} over the radius schedule.

    Classification precedence: polynomial(d) when the max-ratio fit
    against (1 + sum L)^d stabilizes across the two largest radii;
    subexponential-consistent when C_lambda stabilizes for every lambda in
    the grid; lambda0-exponential-only when it stabilizes only from some
    lambda0 on; inconclusive otherwise.
    """
    lambdas = sorted(Fraction(l) for l in lambdas)
    if any(l <= 1 for l in lambdas):
        raise ValueError("lambda grid must be > 1")
    radii = sorted(set(int(r) for r in radii))
    if len(radii) < 2:
        raise ValueError("need at least two radii")
    rmax = radii[-1]
    tuples = enumerate_tuples(phi.group, phi.arity, rmax, cap=cap)
    evaluated = []  # (total_length, |phi| enclosure)
    exact = True
    for tup in tuples:
        enc = phi(tup).abs_enclosure()
        exact = exact and enc.is_exact
        evaluated.append((tuple_total_length(tup), enc))

    table: dict = {}
    for lam in lambdas:
        for r in radii:
            vals = [
                enc.scaled(Fraction(1) / lam**total)
                for total, enc in evaluated
                if total <= r
            ]
            table[(lam, r)] = enclosure_max(vals) if vals else Enclosure.exact(0)

    poly_table: dict = {}
    for d in _POLY_DEGREE_RANGE:
        for r in (radii[-2], radii[-1]):
            vals = [
                enc.scaled(Fraction(1, (1 + total) ** d))
                for total, enc in evaluated
                if total <= r
            ]
            poly_table[(d, r)] = enclosure_max(vals) if vals else Enclosure.exact(0)

    classification = _classify(lambdas, radii, table, poly_table)
    return GrowthReport(phi.name, phi.group.name, phi.arity, lambdas, radii,
                        table, exact, classification)


def _classify(lambdas, radii, table, poly_table) -> dict:
    r_last, r_prev = radii[-1], radii[-2]
    for d in _POLY_DEGREE_RANGE:
        if poly_table[(d, r_prev)] == poly_table[(d, r_last)]:
            return {
                "kind": "polynomial",
                "degree": d,
                "constant": _frac_text(poly_table[(d, r_last)].hi),
            }
    stable = [lam for lam in lambdas if table[(lam, r_prev)] == table[(lam, r_last)]]
    if len(stable) == len(lambdas):
        return {"kind": "subexponential-consistent"}
    if stable:
        return {"kind": "lambda0-exponential-only",
                "lambda0": _frac_text(min(stable))}
    return {"kind": "inconclusive"}


# ----------------------------------------------------------------------
# eta seminorms
# ----------------------------------------------------------------------

class EtaParams(NormParams):
    """NormParams plus the weight schedule of the eta family."""

    def c(self, n: int) -> int:
        return n // 2

    def weight(self, n: int) -> Fraction:
        c = self.c(n)
        return Fraction((2 + 2 * c) ** self.m, math.factorial(c)) / self.N**c

    def d_constant(self, n: int) -> Fraction:
        c = self.c(n)
        return Fraction(math.factorial(c), (2 + 2 * c) ** self.m) * self.N ** c


def eta_seminorm(x: Chain, params: EtaParams) -> Enclosure:
    """weight(n) * sum_terms |coeff| * lambda^{sum L(g_i)}; exact when moduli are."""
    lam = params.lam
    parts = []
    for tup, v in x.items_sorted():
        parts.append(v.abs_enclosure().scaled(lam ** tuple_total_length(tup)))
    return enclosure_sum(parts).scaled(params.weight(x.degree))


@dataclass
class BoundednessReport:
    op: str
    degree: int
    m: int
    m_prime: int
    count: int
    max_ratio: Fraction
    ratios: list

    @property
    def finite(self) -> bool:
        return True  # every computed ratio is a finite rational

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "degree": self.degree,
            "m": self.m,
            "m_prime": self.m_prime,
            "count": self.count,
            "max_ratio": _frac_text(self.max_ratio),
        }


def boundedness_check(op: str, params: EtaParams, degree: int,
                      samples) -> BoundednessReport:
    """Empirical operator bound eta_{N,m'}(op x) / eta_{N,m}(x).

    The documented schedule is m' = m for b and m' = m + 1 for B; the
    constants are report content, not contracts.
    """
    from .complexes import connes_B, hochschild_b

    if op == "b":
        operator, m_prime = hochschild_b, params.m
        if degree < 1:
            raise ValueError("b needs degree >= 1")
    elif op == "B":
        operator, m_prime = connes_B, params.m + 1
    else:
        raise ValueError(f"unknown operator {op!r}")
    out_params = EtaParams(lam=params.lam, N=params.N, m=m_prime)
    ratios = []
    for idx, x in enumerate(samples):
        if x.degree != degree:
            raise ValueError(f"sample {idx} has degree {x.degree}")
        if x.is_zero:
            raise ValueError(f"sample {idx} is zero")
        den = eta_seminorm(x, params).expect_exact()
        num = eta_seminorm(operator(x), out_params).expect_exact()
        ratios.append(num / den)
    if not ratios:
        raise ValueError("no samples")
    return BoundednessReport(op, degree, params.m, m_prime,
                             len(ratios), max(ratios), ratios)
