"""Explicit grid constructions and the prime-product line planner.

Two families live here.  The integer construction builds, for a size
parameter N, the ground set

    Y = union over 0 <= k < N of N^k * (N^N + [0, N^N))

of exactly N^(N+1) positive integers, together with the line family
l_k(x) = N^k x + k N^(N-1) for 0 < k < eps*N.  Every line's escape
count |l(Y) \\ Y| has the exact closed form

    b*N^N + b*(N^(N-b) - 1)/(N - 1)      for l_b,

and the family is in general position (both facts are re-verified at
construction time).

The planner side sieves the primes up to x, forms their product q, and
derives the parameters (k, q, phi(q), s, delta, L) used to select many
lines with product-restricted slopes in general position.  All derived
integers are exact; transcendental constants enter only through
rational interval enclosures, so no result ever depends on floating
point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product as iter_product

from . import caps as caps_mod
from .affine import AffineMap, general_position_check
from .errors import (
    BadIndices,
    BoxEmpty,
    CapExceeded,
    EmptyFamily,
    Exhausted,
    InvariantViolation,
    NotQPower,
)
from .grid import GroundSet, image_deficiency
from .scalar import RationalField, is_prime

try:
    import gmpy2

    def integer_root(n: int, k: int) -> tuple[int, bool]:
        root, exact = gmpy2.iroot(gmpy2.mpz(n), k)
        return int(root), bool(exact)

except ImportError:  # pragma: no cover - exercised via _integer_root_py test

    def integer_root(n: int, k: int) -> tuple[int, bool]:
        return _integer_root_py(n, k)


def _integer_root_py(n: int, k: int) -> tuple[int, bool]:
    """Floor k-th root by Newton iteration on plain ints."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    if n == 0 or k == 1:
        return n, True
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x, x**k == n


# ---------------------------------------------------------------------------
# rational interval enclosures
# ---------------------------------------------------------------------------

Interval = tuple[Fraction, Fraction]


def _atanh_twice(z: Fraction, terms: int) -> Interval:
    # 2*atanh(z) for 0 <= z < 1, with a geometric tail bound
    total = Fraction(0)
    power = z
    z2 = z * z
    for i in range(terms):
        total += power / (2 * i + 1)
        power *= z2
    tail = power / ((2 * terms + 1) * (1 - z2))
    return 2 * total, 2 * (total + tail)


_LN2: Interval = _atanh_twice(Fraction(1, 3), 40)


def log_interval(value, terms: int = 24) -> Interval:
    """Enclosure of the natural log of a positive rational."""
    y = Fraction(value)
    if y <= 0:
        raise ValueError("log of a non-positive value")
    shifts = 0
    while y >= 2:
        y /= 2
        shifts += 1
    while y < 1:
        y *= 2
        shifts -= 1
    lo, hi = _atanh_twice((y - 1) / (y + 1), terms)
    if shifts >= 0:
        return lo + shifts * _LN2[0], hi + shifts * _LN2[1]
    return lo + shifts * _LN2[1], hi + shifts * _LN2[0]


def exp_interval(x: Fraction, terms: int = 25) -> Interval:
    """Enclosure of exp(x) for 0 <= x <= 1."""
    if not 0 <= x <= 1:
        raise ValueError("exp enclosure implemented for [0, 1] only")
    total = Fraction(0)
    term = Fraction(1)
    for i in range(terms):
        total += term
        term = term * x / (i + 1)
    tail = term / (1 - x / (terms + 1))
    return total, total + tail


EULER_E: Interval = exp_interval(Fraction(1))
# Euler-Mascheroni constant, 20 decimal digits
EULER_GAMMA: Interval = (
    Fraction(57721566490153286060, 10**20),
    Fraction(57721566490153286061, 10**20),
)


def sieve_primes(x: int) -> list[int]:
    if x < 2:
        return []
    flags = bytearray([1]) * (x + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(x) + 1):
        if flags[i]:
            flags[i * i :: i] = b"\x00" * len(flags[i * i :: i])
    return [i for i in range(2, x + 1) if flags[i]]


# ---------------------------------------------------------------------------
# the integer (nearly invariant) grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FolnerParams:
    n: int
    eps: Fraction

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("need n >= 2")
        if not 0 < self.eps < 1:
            raise ValueError("need 0 < eps < 1")

    @property
    def line_count(self) -> int:
        """Number of integers in the open interval (0, eps*n)."""
        return math.ceil(self.eps * self.n) - 1

    @property
    def ground_size(self) -> int:
        return self.n ** (self.n + 1)


def folner_lines(params: FolnerParams) -> list[AffineMap]:
    n = params.n
    count = params.line_count
    if count < 1:
        raise EmptyFamily(f"eps*n = {params.eps * n} leaves no line index")
    shift = n ** (n - 1)
    return [AffineMap.of(RationalField, n**k, k * shift) for k in range(1, count + 1)]


def folner_deficiency_exact(b: int, n: int) -> int:
    """Exact escape count of line b: the two loss terms in closed form."""
    return b * n**n + b * (n ** (n - b) - 1) // (n - 1)


def folner_ground(params: FolnerParams, cap: int | None = None) -> GroundSet:
    n = params.n
    size = params.ground_size
    limit = cap if cap is not None else caps_mod.DEFAULT.grid_elements
    if size > limit:
        raise CapExceeded(f"|Y| = {size} exceeds cap {limit}")
    block = n**n
    ground = GroundSet(
        RationalField,
        (n**k * (block + x) for k in range(n) for x in range(block)),
    )
    if len(ground) != size:
        raise InvariantViolation("union blocks were not disjoint")
    return ground


def folner_grid(
    params: FolnerParams, cap: int | None = None
) -> tuple[GroundSet, list[AffineMap]]:
    """Build and fully verify the ground set and its line family."""
    if 2 * params.eps >= 1:
        warnings.warn(
            "2*eps >= 1: the escape bound 2*eps*|Y| is vacuous", stacklevel=2
        )
    lines = folner_lines(params)
    ground = folner_ground(params, cap)
    n = params.n
    bound = 2 * params.eps * len(ground)
    for b, line in enumerate(lines, start=1):
        measured = image_deficiency(line, ground)
        expected = folner_deficiency_exact(b, n)
        if measured != expected:
            raise InvariantViolation(
                f"line {b}: measured escape {measured} != closed form {expected}"
            )
        if measured > bound:
            raise InvariantViolation(f"line {b}: escape {measured} above {bound}")
    if general_position_check(lines):
        raise InvariantViolation("line family not in general position")
    return ground, lines


def folner_det(i: int, j: int, k: int, n: int) -> int:
    """(k-i)*n^j - (j-i)*n^k - (k-j)*n^i; negative whenever 0<i<j<k, k-i<n.

    Equals the determinant of [[1,1,1],[n^i,n^j,n^k],[i,j,k]], the
    concurrency test for lines i, j, k after factoring the common shift.
    """
    if not (0 < i < j < k):
        raise BadIndices(f"need 0 < i < j < k, got {(i, j, k)}")
    if k - i >= n:
        raise BadIndices(f"need k - i < n, got k-i={k - i}, n={n}")
    return (k - i) * n**j - (j - i) * n**k - (k - j) * n**i


def folner_rate(params: FolnerParams, alpha: Fraction) -> dict:
    """Measured density of the family against (1-alpha)*log|Y|/loglog|Y|.

    Diagnostic only: the constant is reported, never asserted.
    """
    size = params.ground_size
    log_y = math.log(size)
    denominator = (1 - float(alpha)) * log_y / math.log(log_y)
    return {
        "n": params.n,
        "eps": str(params.eps),
        "alpha": str(alpha),
        "line_count": params.line_count,
        "ground_size": size,
        "target": denominator,
        "ratio": params.line_count / denominator,
    }


# ---------------------------------------------------------------------------
# prime-product planner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KlaweParams:
    primes: tuple[int, ...]
    k: int
    q: int
    phi_q: int
    s: int
    delta: Fraction
    length: int               # L, exact ceiling of (8q/phi) * q^((1+delta)s)
    condition_ok: bool        # L >= (8q/phi) * max(q^((1+delta)s), (s/4k)^(2k))
    p: int | None = None
    cofactor: int | None = None   # M in p = M*q^s + r
    remainder: int | None = None  # r in p = M*q^s + r, 0 <= r < q^s


@dataclass(frozen=True)
class PrimeEstimateReport:
    x: int
    prime_count_ratio: Interval     # k * log x / x
    log_primorial_ratio: Interval   # log(q) / x
    totient_ratio: Interval         # (phi/q) * e^gamma * log x
    envelopes_ok: dict[str, bool]   # |ratio - 1| <= 4/log x, conservatively

    def to_json(self) -> dict:
        def pair(iv: Interval) -> list[str]:
            return [str(iv[0]), str(iv[1])]

        return {
            "x": self.x,
            "prime_count_ratio": pair(self.prime_count_ratio),
            "log_primorial_ratio": pair(self.log_primorial_ratio),
            "totient_ratio": pair(self.totient_ratio),
            "envelopes_ok": dict(sorted(self.envelopes_ok.items())),
        }


def _ceil_of_scaled_root(coeff_num: int, coeff_den: int, base: int, exp_num: int, exp_den: int) -> int:
    """ceil((coeff_num/coeff_den) * base^(exp_num/exp_den)), all exact.

    Splits the exponent as m + r/exp_den so only base^r needs a root,
    then reads the ceiling off the floor root of the common power.
    """
    m, r = divmod(exp_num, exp_den)
    t = (coeff_num * base**m) ** exp_den * base**r
    w, exact = integer_root(t, exp_den)
    quotient, rem = divmod(w, coeff_den)
    if exact and rem == 0:
        return quotient
    return quotient + 1


def prime_params(x: int) -> tuple[KlaweParams, PrimeEstimateReport]:
    """Sieve the primes up to x and derive the planner parameters."""
    if x < 2:
        raise ValueError("need x >= 2")
    primes = sieve_primes(x)
    k = len(primes)
    q = math.prod(primes)
    phi_q = math.prod(p - 1 for p in primes)
    s_lo = math.ceil(4 * k * EULER_E[0])
    s_hi = math.ceil(4 * k * EULER_E[1])
    if s_lo != s_hi:
        raise InvariantViolation("e enclosure too wide to fix ceil(4*e*k)")
    s = s_lo
    delta = Fraction(1, 4 * k)
    length = _ceil_of_scaled_root(8 * q, phi_q, q, s * (4 * k + 1), 4 * k)
    # second branch of the length condition is rational, compare exactly
    condition_ok = length * phi_q * (4 * k) ** (2 * k) >= 8 * q * s ** (2 * k)

    log_x = log_interval(x)
    log_q = log_interval(q)
    e_gamma = exp_interval(
        EULER_GAMMA[0]
    )[0], exp_interval(EULER_GAMMA[1])[1]
    ratio_k = (k * log_x[0] / x, k * log_x[1] / x)
    ratio_q = (log_q[0] / x, log_q[1] / x)
    phi_frac = Fraction(phi_q, q)
    ratio_phi = (
        phi_frac * e_gamma[0] * log_x[0],
        phi_frac * e_gamma[1] * log_x[1],
    )
    envelope = 4 / log_x[1]  # the tighter end, conservative
    envelopes_ok = {
        name: (1 - envelope <= iv[0] and iv[1] <= 1 + envelope)
        for name, iv in [
            ("prime_count_ratio", ratio_k),
            ("log_primorial_ratio", ratio_q),
            ("totient_ratio", ratio_phi),
        ]
    }
    params = KlaweParams(
        primes=tuple(primes),
        k=k,
        q=q,
        phi_q=phi_q,
        s=s,
        delta=delta,
        length=length,
        condition_ok=condition_ok,
    )
    report = PrimeEstimateReport(
        x=x,
        prime_count_ratio=ratio_k,
        log_primorial_ratio=ratio_q,
        totient_ratio=ratio_phi,
        envelopes_ok=envelopes_ok,
    )
    return params, report


def attach_modulus(params: KlaweParams, p: int) -> KlaweParams:
    """Record a working prime p as p = M*q^s + r with 0 <= r < q^s."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    power = params.q**params.s
    cofactor, remainder = divmod(p, power)
    return replace(params, p=p, cofactor=cofactor, remainder=remainder)


def klawe_slopes(primes: list[int], s: int, cap: int | None = None) -> list[int]:
    """All products of the given primes with each exponent in [0, s/4k].

    Every slope a satisfies exponent-sum mu(a) <= s/4 and a <= q^(s/4k).
    """
    k = len(primes)
    if k == 0:
        raise ValueError("need at least one prime")
    if s < 4 * k:
        raise BoxEmpty(f"s = {s} < 4k = {4 * k}")
    emax = s // (4 * k)
    count = (emax + 1) ** k
    limit = cap if cap is not None else caps_mod.DEFAULT.product_terms
    if count > limit:
        raise CapExceeded(f"{count} slopes exceed cap {limit}")
    slopes = []
    for exponents in iter_product(range(emax + 1), repeat=k):
        slopes.append(math.prod(p**e for p, e in zip(primes, exponents)))
    return sorted(slopes)


def klawe_select_lines(slopes: list[int], b_max: int) -> list[AffineMap]:
    """Greedy intercept selection keeping the family in general position.

    For each slope, in input order, take the smallest intercept
    b in [0, b_max] whose line avoids every intersection point of the
    lines already chosen; each new line then meets the previous ones in
    distinct points, so no three lines share a point.
    """
    if len(set(slopes)) != len(slopes):
        raise ValueError("slopes must be distinct")
    if any(a == 0 for a in slopes):
        raise ValueError("slopes must be nonzero")
    chosen: list[AffineMap] = []
    points: list[tuple[Fraction, Fraction]] = []
    for a in slopes:
        forbidden = set()
        for u, v in points:
            t = v - a * u
            if t.denominator == 1 and 0 <= t <= b_max:
                forbidden.add(int(t))
        b = next((c for c in range(b_max + 1) if c not in forbidden), None)
        if b is None:
            raise Exhausted(f"no intercept left for slope {a} with b_max={b_max}")
        line = AffineMap.of(RationalField, a, b)
        for prior in chosen:
            u = Fraction(prior.b.value - line.b.value, a - prior.a.value)
            points.append((u, a * u + b))
        chosen.append(line)
    if general_position_check(chosen):
        raise InvariantViolation("greedy selection produced a degenerate family")
    return chosen


def mu_exponent(a: int, primes) -> int:
    """Exponent sum of a over the given primes; rejects other factors."""
    if a < 1:
        raise NotQPower(f"{a} is not a positive integer")
    total = 0
    rest = a
    for p in primes:
        while rest % p == 0:
            rest //= p
            total += 1
    if rest != 1:
        raise NotQPower(f"{a} has a factor outside {tuple(primes)}")
    return total


@dataclass(frozen=True)
class ConditionValue:
    value: Fraction
    mu: int
    within_half: bool


def klawe_condition_value(a: int, b: int, r: int, params: KlaweParams) -> ConditionValue:
    """mu(a)/s + ((a*r + b)/L) * (q/phi(q)), the escape-rate budget."""
    if b < 0:
        raise ValueError("need b >= 0")
    mu = mu_exponent(a, params.primes)
    value = Fraction(mu, params.s) + Fraction(a * r + b, params.length) * Fraction(
        params.q, params.phi_q
    )
    return ConditionValue(value=value, mu=mu, within_half=value <= Fraction(1, 2))


@dataclass(frozen=True)
class EscapeCheck:
    deficiency: int
    bound: Fraction
    holds: bool
    value: Fraction
    remainder: int


def klawe_escape_check(
    ground: GroundSet, a: int, b: int, params: KlaweParams
) -> EscapeCheck:
    """Empirical escape-bound check |(aY+b) \\ Y| <= value * |Y|.

    The ground set must live in a prime field; its modulus supplies the
    remainder term r.  The ground set itself is caller-provided.
    """
    if ground.field.is_rational:
        raise ValueError("escape check needs a prime-field ground set")
    p = ground.field.modulus
    remainder = p % params.q**params.s
    cond = klawe_condition_value(a, b, remainder, params)
    line = AffineMap.of(ground.field, a, b)
    deficiency = image_deficiency(line, ground)
    bound = cond.value * len(ground)
    return EscapeCheck(
        deficiency=deficiency,
        bound=bound,
        holds=Fraction(deficiency) <= bound,
        value=cond.value,
        remainder=remainder,
    )
