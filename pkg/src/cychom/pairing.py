"""Cyclic-cocycle extensions of group cochains and the pairing bound.

A normalized arity-n cochain c extends to the functional
tau_c(g_0,..,g_n) = c(g_1,..,g_n) when g_0 g_1 ... g_n = e and 0
otherwise, so tau_c is supported on the homogeneous (identity-class)
summand.  Cyclicity of the extension is verified at runtime rather than
assumed; when the raw extension fails the invariance test it is replaced
by its cyclic average.  The bound certificate instantiates the growth
constant C as the exact fitted maximum over a covering ball, making the
inequality |tau_c(x)| <= C * D * eta(x) fully checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Chain
from .analysis import Cochain, EtaParams, normalize_cochain
from .complexes import (
    Convention,
    conjugacy_split,
    cyclic_tau,
    homogeneous_part,
)
from .groups import enumerate_tuples, tuple_total_length
from .scalars import Enclosure, Scalar, enclosure_max


class NormalizationRequired(ValueError):
    """The base cochain is not normalized and normalization was not consented."""


class CoverRadiusError(ValueError):
    """The fitted constant does not cover the chain's support."""


class CyclicCocycle:
    """Extension of a group cochain over (n+1)-tuples with product e."""

    def __init__(self, base: Cochain, evaluator, convention: Convention,
                 certificate: str = "unverified", normalization_applied: bool = False):
        self.base = base
        self.group = base.group
        self.arity = base.arity
        self.evaluator = evaluator
        self.convention = convention
        self.certificate = certificate
        self.normalization_applied = normalization_applied

    def __call__(self, tup) -> Scalar:
        tup = tuple(tup)
        if len(tup) != self.arity + 1:
            raise ValueError(
                f"cyclic cocycle of arity {self.arity} takes {self.arity + 1}-tuples"
            )
        return self.evaluator(tup)

    def __repr__(self):
        return (f"CyclicCocycle({self.base.name!r}, arity={self.arity}, "
                f"certificate={self.certificate!r})")


def _product_is_identity(tup) -> bool:
    prod = tup[0]
    for g in tup[1:]:
        prod = prod * g
    return prod.is_identity


def extend_to_cyclic(c: Cochain, normalize: bool = False,
                     convention=Convention.STANDARD) -> CyclicCocycle:
    """tau_c(g_0..g_n) = c(g_1..g_n) on product-e tuples, else 0."""
    convention = Convention.coerce(convention)
    applied = False
    if not c.normalized:
        if not normalize:
            raise NormalizationRequired(
                f"cochain {c.name!r} is not normalized; pass normalize=True "
                "to zero it on degenerate tuples"
            )
        c = normalize_cochain(c)
        applied = True

    def evaluate(tup):
        if not _product_is_identity(tup):
            return Scalar.zero()
        return c(tup[1:])

    return CyclicCocycle(c, evaluate, convention,
                         certificate="unverified", normalization_applied=applied)


def check_cyclicity(tc: CyclicCocycle, tuples) -> list:
    """Violations of tau_c(tau(t)) = tau_c(t) under the convention in force.

    tau here is the signed chain rotation, so invariance of the functional
    means tau_c composed with tau equals tau_c.
    """
    sign = tc.convention.tau_sign(tc.arity)
    violations = []
    for tup in tuples:
        rotated = (tup[-1],) + tup[:-1]
        lhs = tc(rotated)
        lhs = lhs if sign > 0 else -lhs
        if lhs != tc(tup):
            violations.append(tup)
    return violations


def verify_cyclicity(tc: CyclicCocycle, scan_radius: int, cap=None) -> bool:
    """Exhaustive ball scan; on success upgrades the certificate."""
    tuples = enumerate_tuples(tc.group, tc.arity + 1, scan_radius, cap=cap)
    if check_cyclicity(tc, tuples):
        return False
    if tc.certificate == "unverified":
        tc.certificate = "verified-on-samples"
    return True


def cyclic_symmetrize(tc: CyclicCocycle) -> CyclicCocycle:
    """Average of tau_c over the signed rotation action; idempotent.

    Under the standard convention the (n+1)-fold signed rotation is the
    identity, so the average is a projection onto cyclic functionals.
    """
    n = tc.arity
    sign = tc.convention.tau_sign(n)
    count = n + 1

    def evaluate(tup):
        total = Scalar.zero()
        cur = tuple(tup)
        s = 1
        for _ in range(count):
            v = tc(cur)
            total = total + (v if s > 0 else -v)
            cur = (cur[-1],) + cur[:-1]
            s *= sign
        return total / Scalar(count)

    return CyclicCocycle(tc.base, evaluate, tc.convention,
                         certificate="symmetrized",
                         normalization_applied=tc.normalization_applied)


def pair(tc: CyclicCocycle, x: Chain) -> Scalar:
    """sum_i gamma_i * tau_c(tuple_i), exact."""
    if x.degree != tc.arity:
        raise ValueError(
            f"arity mismatch: cocycle {tc.arity}, chain degree {x.degree}"
        )
    total = Scalar.zero()
    for tup, coeff in x.items():
        v = tc(tup)
        if not v.is_zero:
            total = total + coeff * v
    return total


# ----------------------------------------------------------------------
# the pairing bound certificate
# ----------------------------------------------------------------------

@dataclass
class BoundCertificate:
    chain_id: str
    cochain_id: str
    lam: Fraction
    N: Fraction
    m: int
    degree: int
    cover_radius: int
    left: Enclosure       # |tau_c(x)|
    growth_constant: Fraction
    d_constant: Fraction
    eta: Enclosure
    right: Enclosure      # C * D * eta
    verdict: str          # "pass" or "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "chain": self.chain_id,
            "cochain": self.cochain_id,
            "lambda": _ftext(self.lam),
            "N": _ftext(self.N),
            "m": self.m,
            "degree": self.degree,
            "cover_radius": self.cover_radius,
            "left": _enc_json(self.left),
            "C": _ftext(self.growth_constant),
            "D": _ftext(self.d_constant),
            "eta": _enc_json(self.eta),
            "right": _enc_json(self.right),
            "verdict": self.verdict,
        }


def _ftext(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _enc_json(e: Enclosure):
    if e.is_exact:
        return _ftext(e.lo)
    return {"lo": _ftext(e.lo), "hi": _ftext(e.hi)}


def fit_growth_constant(c: Cochain, lam: Fraction, radius: int, cap=None) -> Fraction:
    """Exact max of |c| * lam^{-sum L} over arity-tuples of total length <= radius."""
    lam = Fraction(lam)
    tuples = enumerate_tuples(c.group, c.arity, radius, cap=cap)
    best = Enclosure.exact(0)
    for tup in tuples:
        enc = c(tup).abs_enclosure().scaled(Fraction(1) / lam**tuple_total_length(tup))
        best = enclosure_max([best, enc])
    return best.hi


def verify_pairing_bound(c: Cochain, x: Chain, params: EtaParams,
                         cover_radius: int, normalize: bool = False,
                         convention=Convention.STANDARD, cap=None,
                         chain_id: str = "chain",
                         cochain_id: str | None = None) -> BoundCertificate:
    """Certify |tau_c(x)| <= C * D_{N,m,n} * eta_{N,m}(x) with fitted C.

    The constant is fitted on the ball of the given covering radius, which
    must dominate every term's total word length so the constant genuinely
    covers the support of x.
    """
    from .analysis import eta_seminorm

    if x.degree != c.arity:
        raise ValueError("chain degree must equal cochain arity")
    support_radius = x.max_total_length()
    if cover_radius < support_radius:
        raise CoverRadiusError(
            f"cover radius {cover_radius} < max total length {support_radius}"
        )
    tc = extend_to_cyclic(c, normalize=normalize, convention=convention)
    value = pair(tc, x)
    left = value.abs_enclosure()
    growth_c = fit_growth_constant(tc.base, params.lam, cover_radius, cap=cap)
    d_const = params.d_constant(c.arity)
    eta = eta_seminorm(x, params)
    right = eta.scaled(growth_c * d_const)
    if left.is_exact and right.is_exact:
        verdict = "pass" if left.lo <= right.lo else "fail"
    else:
        verdict = "pass" if left.definitely_le(right) else "fail"
    return BoundCertificate(
        chain_id, cochain_id or c.name, params.lam, params.N, params.m,
        x.degree, cover_radius, left, growth_c, d_const, eta, right, verdict,
    )


# ----------------------------------------------------------------------
# homogeneous factoring
# ----------------------------------------------------------------------

@dataclass
class FactoringReport:
    pairing: Scalar
    homogeneous_pairing: Scalar

    @property
    def passed(self) -> bool:
        return self.pairing == self.homogeneous_pairing

    def to_json(self) -> dict:
        return {
            "pairing": str(self.pairing),
            "homogeneous_pairing": str(self.homogeneous_pairing),
            "passed": self.passed,
        }


def homogeneous_factoring_check(c: Cochain, x: Chain, normalize: bool = False,
                                convention=Convention.STANDARD) -> FactoringReport:
    """pair(tau_c, x) must equal pair(tau_c, homogeneous part of x), exactly."""
    tc = extend_to_cyclic(c, normalize=normalize, convention=convention)
    full = pair(tc, x)
    homog = pair(tc, homogeneous_part(x))
    return FactoringReport(full, homog)


def support_violations(tc: CyclicCocycle, scan_radius: int, cap=None) -> list:
    """Tuples with product != e where tau_c fails to vanish (exhaustive scan)."""
    violations = []
    for tup in enumerate_tuples(tc.group, tc.arity + 1, scan_radius, cap=cap):
        if not _product_is_identity(tup) and not tc(tup).is_zero:
            violations.append(tup)
    return violations
