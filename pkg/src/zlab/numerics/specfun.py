"""Special functions the transform layer needs: Gamma and 0F2.

gamma_fn is a Lanczos approximation (g = 7, 9 terms) good to ~1e-14
relative on the positive axis; the same table extends to complex arguments
for the critical-line zeta oracle.  Quarter-integer Gamma values are also
available in double-double via the exact recurrence from frozen seeds,
because the hypergeometric closed form consumes them at full precision.

hyper0f2 sums the defining series term by term; the ratio
x / ((b1+n)(b2+n)(n+1)) eventually decays like n^{-3}, so convergence is
unconditional but the partial sums can grow enormous before turning over;
callers fighting cancellation run it in extended mode.
"""

from __future__ import annotations

import cmath
import math

from ..errors import DomainError, NonConvergence
from . import ddouble as dd
from .ddouble import DD
from .quadrature import PrecisionConfig, NATIVE

# Lanczos g=7 n=9 (Godfrey's coefficients)
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_complex(z: complex) -> complex:
    """Gamma on the complex plane, reflection for Re z < 0.5."""
    z = complex(z)
    if z.real < 0.5:
        s = cmath.sin(cmath.pi * z)
        if s == 0:
            raise DomainError("gamma pole at a nonpositive integer")
        return cmath.pi / (s * gamma_complex(1.0 - z))
    z -= 1.0
    x = _LANCZOS_C[0]
    for k in range(1, 9):
        x += _LANCZOS_C[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    # exponents combined so the power alone cannot overflow before Gamma does
    return math.sqrt(2.0 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


def gamma_fn(x: float) -> float:
    """Gamma restricted to the positive real axis."""
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError("gamma_fn requires a positive finite argument")
    if x > 171.6:
        raise DomainError("gamma_fn overflows past x = 171.6")
    return gamma_complex(complex(x, 0.0)).real


def gamma_quarter_dd(q: int) -> DD:
    """Gamma(q/4) in double-double for positive integer q.

    Built by the recurrence Gamma(x+1) = x Gamma(x) from frozen seeds at
    1/4, 1/2, 3/4, 1; every recurrence factor (q-4)/4 is a dyadic rational,
    so no rounding enters beyond the dd multiplications.
    """
    if q <= 0:
        raise DomainError("gamma_quarter_dd requires q >= 1")
    seeds = {1: dd.GAMMA_1_4, 2: dd.SQRT_PI, 3: dd.GAMMA_3_4, 4: dd.ONE}
    r = q % 4 or 4
    val = DD(seeds[r].hi, seeds[r].lo)
    k = r
    while k < q:
        val = val * (k / 4.0)
        k += 4
    return val


def hyper0f2(b1: float, b2: float, x: float,
             pc: PrecisionConfig = NATIVE,
             rel_tol: float = 1e-16,
             max_terms: int = 10 ** 6):
    """Generalized hypergeometric 0F2(;b1,b2;x).

    Returns a float in native mode, a DD in extended mode.  Termination:
    five consecutive terms below rel_tol * |sum| (guard against lucky
    zeros); NonConvergence past max_terms.  In extended mode x may be a
    DD; rounding it to a float head would dominate the error budget of
    severely cancelled downstream combinations.
    """
    for b in (b1, b2):
        if b <= 0 and float(b).is_integer():
            raise DomainError("0F2 parameter at a nonpositive integer")
    if pc.mode == "extended":
        total = DD(1.0, 0.0)
        term = DD(1.0, 0.0)
        xd = x if isinstance(x, DD) else DD(float(x), 0.0)
        below = 0
        for n in range(max_terms):
            denom = DD.from_product(b1 + n, b2 + n) * float(n + 1)
            term = term * xd / denom
            total = total + term
            if abs(float(term.hi)) <= rel_tol * abs(float(total.hi)):
                below += 1
                if below >= 5:
                    return total
            else:
                below = 0
        raise NonConvergence("0F2 series still above tolerance at the term cap")
    if isinstance(x, DD):
        x = x.to_float()
    total = 1.0
    term = 1.0
    below = 0
    for n in range(max_terms):
        term *= x / ((b1 + n) * (b2 + n) * (n + 1))
        total += term
        if abs(term) <= rel_tol * abs(total):
            below += 1
            if below >= 5:
                return total
        else:
            below = 0
    raise NonConvergence("0F2 series still above tolerance at the term cap")
