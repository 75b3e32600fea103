"""Densities on the line obtained by inverting characteristic functions,
and sign checks on the minors of their translation kernels K(x, y) = f(x-y).

A characteristic function from the product class corresponds to the law of
omega + sum_j (d_j - Y_j) + sqrt(2 d) N with Y_j exponential of scale d_j
and N standard normal.  With d > 0 the density is recovered by oscillatory
quadrature of (1/2pi) int e^{-i t a} p(t) dt; with d = 0 it is written in
closed form as a hypoexponential density reflected to its support
(-inf, omega + sum d_j].

Minor checks evaluate det[f(x_i - y_j)] over ordered grid subsets with the
determinant accumulated in double-double, so a reported near-zero minor
reflects the data, not elimination noise.  Collocated-column limits of the
same minors (derivative minors) use exact spectral or termwise derivatives
when the source provides them and Richardson-checked central differences
otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, NonIntegrableTransform, NonSmoothPoint
from .numerics import ddouble as dd
from .numerics.ddouble import DD, DDComplex
from .numerics.quadrature import (
    NATIVE,
    PrecisionConfig,
    QuadratureConfig,
    integrate_adaptive,
)
from .schoenberg import SchoenbergParams, eval_p

TWO_PI = 2.0 * math.pi


# ---------- hypoexponential term lists ----------
#
# A term (c, p, lam) stands for c * s^p * e^{-lam s} on s >= 0.  Convolving
# with a fresh exponential density lam_new e^{-lam_new s} maps each term to
# a short list of terms, exactly; repeated rates take the polynomial branch.


def _convolve_exponential(terms: dict, lam: float) -> dict:
    out: dict = {}

    def add(key, val):
        out[key] = out.get(key, 0.0) + val

    for (p, mu), c in terms.items():
        if mu == lam:
            add((p + 1, lam), lam * c / (p + 1))
            continue
        alpha = lam - mu
        # int_0^s x^p e^{alpha x} dx expanded by parts; the x = 0 boundary
        # contributes a pure e^{-lam s} term
        for q in range(p + 1):
            coef = ((-1.0) ** (p - q)) * math.factorial(p) / math.factorial(q)
            add((q, mu), lam * c * coef * alpha ** -(p - q + 1))
        add((0, lam), lam * c * ((-1.0) ** (p + 1)) * math.factorial(p)
            * alpha ** -(p + 1))
    return out


def _hypoexp_terms(scales: tuple[float, ...]) -> list[tuple[float, int, float]]:
    """Density of sum of independent exponentials with the given scales,
    as a term list over s >= 0.  Scales must be positive."""
    lam0 = 1.0 / scales[0]
    terms = {(0, lam0): lam0}
    for s in scales[1:]:
        terms = _convolve_exponential(terms, 1.0 / s)
    return [(c, p, mu) for (p, mu), c in sorted(terms.items())]


def _eval_terms(terms, s):
    scalar = np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros_like(s_arr)
    pos = s_arr >= 0.0
    sp = s_arr[pos]
    with np.errstate(under="ignore"):
        acc = np.zeros_like(sp)
        for c, p, mu in terms:
            acc = acc + c * sp**p * np.exp(-mu * sp)
    out[pos] = acc
    return float(out[0]) if scalar else out


def _diff_terms(terms):
    """Termwise derivative of a term list (valid on s > 0)."""
    out: dict = {}
    for c, p, mu in terms:
        if p:
            out[(p - 1, mu)] = out.get((p - 1, mu), 0.0) + c * p
        out[(p, mu)] = out.get((p, mu), 0.0) - c * mu
    return [(c, p, mu) for (p, mu), c in sorted(out.items())]


# ---------- density sources ----------


class SchoenbergDensity:
    """f(a) = (1/2pi) int e^{-ita} p(t) dt for a product-class p.

    d > 0: adaptive oscillatory quadrature (Gaussian factor truncates the
    t-range).  d = 0: exact closed form from the convolution structure;
    requires at least one nonzero coefficient (k = 0 is a point mass) and
    coefficients of a single sign.
    """

    def __init__(self, params: SchoenbergParams):
        self.params = params
        self.mean = params.omega
        self.edge = params.omega + params.coeff_sum  # support edge when d = 0
        nonzero = tuple(c for c in params.coeffs if c != 0.0)
        self._mirror = False
        self._terms = None
        if params.d == 0.0:
            if not nonzero:
                raise NonIntegrableTransform(
                    "d = 0 with no exponential factors is a point mass")
            if all(c > 0.0 for c in nonzero):
                self._terms = _hypoexp_terms(nonzero)
            elif all(c < 0.0 for c in nonzero):
                # mirror symmetry: negate coefficients and reflect a
                self._terms = _hypoexp_terms(tuple(-c for c in nonzero))
                self._mirror = True
            else:
                raise InvalidSpec(
                    "d = 0 with mixed-sign coefficients is not supported")

    @property
    def std(self) -> float:
        return math.sqrt(2.0 * self.params.d
                         + sum(c * c for c in self.params.coeffs))

    def suggest_window(self) -> tuple[float, float]:
        lo = self.mean - 4.0 * self.std
        hi = self.mean + 4.0 * self.std
        if self.params.d == 0.0:
            if self._mirror:
                lo = max(lo, self.edge)  # support is [edge, inf)
            else:
                hi = min(hi, self.edge)  # support is (-inf, edge]
        return (lo, hi)

    def _closed_form(self, a, order: int = 0):
        terms = self._terms
        for _ in range(order):
            terms = _diff_terms(terms)
        if self._mirror:
            # f(a) = h(a - edge') with edge' = omega + sum c_j (negative sum)
            s = np.asarray(a, dtype=float) - self.edge
            sign = 1.0
        else:
            s = self.edge - np.asarray(a, dtype=float)
            sign = (-1.0) ** order
        val = _eval_terms(terms, s if np.ndim(a) else float(s))
        return sign * val

    def _quad_radius(self, eps: float = 1e-16) -> float:
        # |p(t)| <= e^{-d t^2}; solve e^{-d T^2} * T = eps
        d = self.params.d
        T = math.sqrt(-math.log(eps) / d)
        for _ in range(20):
            T = math.sqrt((-math.log(eps) + math.log(1.0 + T)) / d)
        return T

    def eval(self, a, qc: QuadratureConfig | None = None,
             pc: PrecisionConfig = NATIVE, order: int = 0):
        """f(a) (or its order-th derivative) at scalar or array a."""
        if self._terms is not None:
            out = self._closed_form(a, order)
            return out if np.ndim(a) else float(out)
        qc = qc or QuadratureConfig()
        T = qc.truncation_radius or self._quad_radius()
        scalar = np.ndim(a) == 0
        a_arr = np.atleast_1d(np.asarray(a, dtype=float))
        params = self.params
        out = np.empty(a_arr.shape, dtype=float)
        for i, ai in enumerate(a_arr):
            def f(t, _a=ai):
                return np.exp(-1j * t * _a) * eval_p(params, t + 0j) \
                    * ((-1j * t) ** order if order else 1.0)

            def f_dd(t, _a=ai, _o=order):
                val = _p_dd(params, t)
                ph = dd.exp_i(t * (-_a))
                val = val * ph
                for _ in range(_o):
                    val = val * DDComplex(DD(np.zeros_like(t.hi), np.zeros_like(t.hi)),
                                          -t)
                return val

            res = integrate_adaptive(
                f, -T, T, qc=qc, pc=pc, f_dd=f_dd,
                max_panel_width=math.pi / (2.0 * max(1.0, abs(ai))))
            out[i] = res.value.real / TWO_PI
        return out if not scalar else float(out[0])

    def deriv(self, a, order: int, qc=None, pc=NATIVE):
        return self.eval(a, qc=qc, pc=pc, order=order)


def _p_dd(params: SchoenbergParams, t: DD) -> DDComplex:
    """Product-class characteristic function on real dd arguments."""
    zeros = np.zeros_like(np.asarray(t.hi, dtype=float))
    w = dd.exp(-(t.sqr() * params.d))
    out = dd.exp_i(t * params.omega) * DDComplex(w, DD(zeros, zeros.copy()))
    for c in params.coeffs:
        if c == 0.0:
            continue
        ct = t * c
        denom = DDComplex(DD(np.ones_like(zeros), zeros.copy()), ct)
        out = out * dd.exp_i(ct) / denom
    return out


class CallableDensity:
    """Wrap a vectorized callable f(a); used for controls and user data."""

    def __init__(self, fn, window: tuple[float, float] | None = None,
                 name: str = "callable"):
        self.fn = fn
        self.window = window
        self.name = name

    def suggest_window(self):
        if self.window is None:
            raise InvalidSpec("callable density needs an explicit window")
        return self.window

    def eval(self, a, qc=None, pc=NATIVE, order: int = 0):
        if order:
            raise InvalidSpec("callable densities expose no derivatives")
        out = self.fn(np.asarray(a, dtype=float))
        return out if np.ndim(a) else float(out)


class TabulatedDensity:
    """Density known on a sorted grid; linear or natural-cubic interpolation,
    zero outside the tabulated range."""

    def __init__(self, grid, values, interp: str = "cubic"):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 4:
            raise InvalidSpec("need matching 1-d arrays with >= 4 points")
        if not np.all(np.diff(grid) > 0):
            raise InvalidSpec("grid must be strictly increasing")
        if interp not in ("linear", "cubic"):
            raise InvalidSpec("interp must be 'linear' or 'cubic'")
        self.grid = grid
        self.values = values
        self.interp = interp
        if interp == "cubic":
            self._m = _natural_cubic_moments(grid, values)

    def suggest_window(self):
        return (float(self.grid[0]), float(self.grid[-1]))

    def eval(self, a, qc=None, pc=NATIVE, order: int = 0):
        if order:
            raise InvalidSpec("tabulated densities expose no derivatives")
        a_arr = np.asarray(a, dtype=float)
        if self.interp == "linear":
            out = np.interp(a_arr, self.grid, self.values, left=0.0, right=0.0)
        else:
            out = _natural_cubic_eval(self.grid, self.values, self._m, a_arr)
        return out if np.ndim(a) else float(out)


def _natural_cubic_moments(x, y):
    """Second derivatives of the natural cubic spline (Thomas algorithm)."""
    n = x.size
    h = np.diff(x)
    a = np.zeros(n)
    b = np.ones(n)
    c = np.zeros(n)
    r = np.zeros(n)
    a[1:-1] = h[:-1]
    b[1:-1] = 2.0 * (h[:-1] + h[1:])
    c[1:-1] = h[1:]
    r[1:-1] = 6.0 * ((y[2:] - y[1:-1]) / h[1:] - (y[1:-1] - y[:-2]) / h[:-1])
    # forward sweep
    for i in range(1, n):
        w = a[i] / b[i - 1]
        b[i] -= w * c[i - 1]
        r[i] -= w * r[i - 1]
    m = np.zeros(n)
    m[-1] = r[-1] / b[-1]
    for i in range(n - 2, -1, -1):
        m[i] = (r[i] - c[i] * m[i + 1]) / b[i]
    return m


def _natural_cubic_eval(x, y, m, q):
    q_arr = np.atleast_1d(q)
    out = np.zeros(q_arr.shape, dtype=float)
    inside = (q_arr >= x[0]) & (q_arr <= x[-1])
    qi = q_arr[inside]
    idx = np.clip(np.searchsorted(x, qi) - 1, 0, x.size - 2)
    h = x[idx + 1] - x[idx]
    t = qi - x[idx]
    out[inside] = (
        y[idx]
        + t * ((y[idx + 1] - y[idx]) / h - h * (2.0 * m[idx] + m[idx + 1]) / 6.0)
        + t * t * m[idx] / 2.0
        + t * t * t * (m[idx + 1] - m[idx]) / (6.0 * h)
    )
    return out if np.ndim(q) else float(out[0])


# ---------- minors ----------


def det_dd(rows: list[list[DD]]) -> DD:
    """Determinant by LU with partial pivoting, in double-double."""
    n = len(rows)
    a = [row[:] for row in rows]
    sign = 1.0
    det = DD(1.0, 0.0)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col].hi))
        if a[piv][col].hi == 0.0 and a[piv][col].lo == 0.0:
            return DD(0.0, 0.0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        det = det * a[col][col]
        inv_p = a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] / inv_p
            for ccol in range(col + 1, n):
                a[r][ccol] = a[r][ccol] - factor * a[col][ccol]
    return det * sign if sign < 0 else det


@dataclass(frozen=True)
class TPReport:
    """Outcome of a minor scan: minimum normalized minor and its location."""

    order: int
    passed: bool
    min_minor: float
    min_minor_normalized: float
    argmin_x: tuple[float, ...]
    argmin_y: tuple[float, ...]
    minors_checked: int
    tol: float
    exhaustive: bool
    violations: int


def _grid_from_window(window, n):
    lo, hi = window
    if not (hi > lo):
        raise InvalidSpec("window must have positive width")
    return np.linspace(lo, hi, n)


def check_pf_minors(
    source,
    order: int = 2,
    window: tuple[float, float] | None = None,
    grid_size: int = 12,
    tol: float = 1e-10,
    max_minors: int = 100_000,
    seed: int = 0,
    qc: QuadratureConfig | None = None,
    pc: PrecisionConfig = NATIVE,
) -> TPReport:
    """Scan order-r minors det[f(x_i - y_j)] over ordered grid subsets.

    Exhaustive when the pair count fits in max_minors, otherwise a seeded
    subsample of sorted index subsets.  Minors are normalized by the product
    of row maxima before the sign test, so scale cannot mask a violation.
    """
    if not 1 <= order <= 5:
        raise InvalidSpec("minor order must be in 1..5")
    if grid_size < order:
        raise InvalidSpec("grid_size must be at least the minor order")
    window = window or source.suggest_window()
    xs = _grid_from_window(window, grid_size)
    ys = xs.copy()
    diffs = xs[:, None] - ys[None, :]
    fvals = source.eval(diffs.ravel(), qc=qc, pc=pc).reshape(diffs.shape)
    F = [[DD(float(fvals[i, j]), 0.0) for j in range(grid_size)]
         for i in range(grid_size)]

    combos = list(itertools.combinations(range(grid_size), order))
    n_pairs = len(combos) ** 2
    exhaustive = n_pairs <= max_minors
    if exhaustive:
        pair_iter = itertools.product(combos, combos)
        total = n_pairs
    else:
        rng = np.random.default_rng(seed)
        def sampled():
            for _ in range(max_minors):
                xi = tuple(sorted(rng.choice(grid_size, order, replace=False)))
                yi = tuple(sorted(rng.choice(grid_size, order, replace=False)))
                yield xi, yi
        pair_iter = sampled()
        total = max_minors

    min_norm = math.inf
    min_raw = 0.0
    argx: tuple = ()
    argy: tuple = ()
    violations = 0
    for xi, yi in pair_iter:
        sub = [[F[i][j] for j in yi] for i in xi]
        det = det_dd(sub)
        raw = det.to_float()
        scale = 1.0
        for row in sub:
            scale *= max(abs(e.hi) for e in row)
        norm = raw / scale if scale > 0.0 else raw
        if norm < min_norm:
            min_norm = norm
            min_raw = raw
            argx = tuple(float(xs[i]) for i in xi)
            argy = tuple(float(ys[j]) for j in yi)
        if norm < -tol:
            violations += 1
    return TPReport(
        order=order,
        passed=violations == 0,
        min_minor=min_raw,
        min_minor_normalized=min_norm if min_norm < math.inf else 0.0,
        argmin_x=argx,
        argmin_y=argy,
        minors_checked=total,
        tol=tol,
        exhaustive=exhaustive,
        violations=violations,
    )


@dataclass(frozen=True)
class DerivMinorReport:
    order: int
    passed: bool
    min_minor: float
    argmin_x: tuple[float, ...]
    y: float
    minors_checked: int
    tol: float
    method: str


def _fd_derivative(source, x, order, h, qc, pc):
    """Central differences of order h^2 for f^(order), with one Richardson
    halving used as a consistency check."""
    stencils = {
        0: ([0.0], [1.0], 1.0),
        1: ([-1.0, 1.0], [-0.5, 0.5], 1.0),
        2: ([-1.0, 0.0, 1.0], [1.0, -2.0, 1.0], 2.0),
        3: ([-2.0, -1.0, 1.0, 2.0], [-0.5, 1.0, -1.0, 0.5], 3.0),
        4: ([-2.0, -1.0, 0.0, 1.0, 2.0], [1.0, -4.0, 6.0, -4.0, 1.0], 4.0),
    }
    offs, wts, pw = stencils[order]

    def estimate(step):
        pts = np.asarray([x + o * step for o in offs])
        vals = source.eval(pts, qc=qc, pc=pc)
        return float(np.dot(wts, np.atleast_1d(vals))) / step**order if order \
            else float(np.atleast_1d(vals)[0])

    d1 = estimate(h)
    d2 = estimate(h / 2.0)
    # h^2 stencils: Richardson difference estimates the truncation error
    err = abs(d1 - d2) / 3.0
    best = (4.0 * d2 - d1) / 3.0
    return best, err


def check_derivative_minors(
    source,
    x_points,
    order: int = 2,
    y: float = 0.0,
    h: float = 1e-2,
    tol: float = 1e-8,
    smooth_tol: float = 1e-3,
    qc: QuadratureConfig | None = None,
    pc: PrecisionConfig = NATIVE,
) -> DerivMinorReport:
    """Collocated-column minors: (-1)^{r(r-1)/2} det[f^{(q)}(x_i - y)] over
    sorted x-subsets of size r = order, q = 0..r-1.

    Uses the source's exact derivatives when it has them; otherwise central
    differences, raising NonSmoothPoint when the Richardson halving check
    shows the derivative estimates are inconsistent (kink or jump inside
    the stencil).
    """
    if not 1 <= order <= 5:
        raise InvalidSpec("minor order must be in 1..5")
    xs = np.sort(np.asarray(x_points, dtype=float))
    if xs.size < order:
        raise InvalidSpec("need at least `order` x points")
    has_exact = hasattr(source, "deriv") or isinstance(source, SchoenbergDensity)
    method = "exact" if has_exact else "central-differences"

    # derivative table D[i][q] = f^{(q)}(x_i - y)
    D = []
    for xi in xs:
        row = []
        for q in range(order):
            if has_exact:
                row.append(float(source.eval(xi - y, qc=qc, pc=pc, order=q)))
            else:
                val, err = _fd_derivative(source, xi - y, q, h, qc, pc)
                scale = max(abs(val), 1e-12)
                if err > smooth_tol * scale + 1e-9:
                    raise NonSmoothPoint(
                        f"derivative {q} at {xi - y:g} is inconsistent "
                        f"under step halving (err {err:.2e})")
                row.append(val)
        D.append(row)

    sign = (-1.0) ** (order * (order - 1) // 2)
    min_minor = math.inf
    argx: tuple = ()
    checked = 0
    violations = 0
    for idx in itertools.combinations(range(xs.size), order):
        sub = [[DD(D[i][q], 0.0) for q in range(order)] for i in idx]
        val = sign * det_dd(sub).to_float()
        checked += 1
        if val < min_minor:
            min_minor = val
            argx = tuple(float(xs[i]) for i in idx)
        if val < -tol:
            violations += 1
    return DerivMinorReport(
        order=order,
        passed=violations == 0,
        min_minor=min_minor,
        argmin_x=argx,
        y=y,
        minors_checked=checked,
        tol=tol,
        method=method,
    )
