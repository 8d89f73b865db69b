"""Finite-set Dirichlet solver for the semi-linear graph equation.

Given a weighted graph, a potential W with certified lower bound W0 > 0,
a nonlinearity phi and data f, the solver computes the unique minimizer
of the energy

    E(u) = Q(u, u) + sum_x Phi(f(x) - W(x) u(x)) m(x) / W(x)

over functions supported in a finite vertex set U.  The minimizer is
characterized by the per-vertex stationarity conditions

    (deg(x) u(x) - sum_y b(x,y) u(y)) / m(x) = phi(f(x) - W(x) u(x)),

equivalently phi^{-1}(L u) + W u = f on U, with u = 0 off U.

Method: nonlinear Gauss-Seidel.  Each sweep revisits the vertices of U
and re-solves the scalar stationarity equation at x in the unknown
t = u(x), holding neighbors fixed.  That scalar function

    F(t) = (deg(x) t - S) / m(x) - phi(f(x) - W(x) t),  S = sum b(x,y) u(y),

is strictly increasing, and as long as all neighbor values stay in
[-K, K] with K = ||f||_inf / W0 the root lies in [-K, K] as well (F is
nonpositive at -K and nonnegative at +K there).  Roots are found by
bisection on the certified bracket [-K-1, K+1], accelerated by Newton
steps whenever a derivative hint exists and the step stays inside the
shrinking bracket.  Starting from u = 0 with f >= 0 the sweep map is
monotone, so iterates increase toward the minimizer; for general f the
same map is a contraction in the sup norm with factor bounded by
deg / (deg + m W0) < 1 at each vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections import deque
from collections.abc import Callable, Iterable

from .graphs import VertexFunction, WeightedGraph, energy, laplacian_apply
from .nonlinearity import Nonlinearity, RangeError

__all__ = [
    "Potential",
    "SolveOptions",
    "SolveResult",
    "ResidualReport",
    "SolveError",
    "solve_dirichlet",
    "energy_functional",
    "residual",
]


@dataclass(frozen=True)
class Potential:
    """Strictly positive vertex potential with a certified lower bound.

    W0 must satisfy W(x) >= W0 > 0 at every vertex the run touches; it
    feeds the a priori bound ||u||_inf <= ||f||_inf / W0 that certifies
    the solver's root brackets.
    """

    fn: Callable[[int], float]
    W0: float

    def __post_init__(self):
        if not (self.W0 > 0.0) or not math.isfinite(self.W0):
            raise ValueError(f"W0 must be a positive real, got {self.W0!r}")

    @classmethod
    def constant(cls, c: float) -> "Potential":
        c = float(c)
        return cls(fn=lambda x: c, W0=c)

    @classmethod
    def from_callable(cls, fn: Callable[[int], float], W0: float) -> "Potential":
        return cls(fn=fn, W0=float(W0))

    def __call__(self, x: int) -> float:
        return self.fn(x)


@dataclass(frozen=True)
class SolveOptions:
    """Iteration controls.

    The residual test is scaled per vertex by 1 + |f(x)|: at data of
    order one that is the plain absolute test, while at very large f
    (potentials like deg^2 push f beyond 1e40) float64 cannot represent
    an absolute residual below the rounding of f itself.
    """

    sweep_tol: float = 1e-10
    residual_tol: float = 1e-9
    max_sweeps: int = 100_000
    scalar_root_tol: float = 1e-12
    sweep_order: str = "bfs-from-root"

    def __post_init__(self):
        if self.sweep_tol <= 0 or self.residual_tol <= 0 or self.scalar_root_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.sweep_order not in ("natural", "bfs-from-root"):
            raise ValueError(f"unknown sweep_order {self.sweep_order!r}")


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one Dirichlet solve.

    ``max_decrease`` is the largest single-update decrease observed
    across all sweeps; for f >= 0 started at zero (or warm-started from
    a smaller problem) the iteration is monotone and this stays at
    root-finder noise.  ``range_violations`` lists vertices where the
    final L u left ran phi, which forces ``converged = False``.
    """

    u: VertexFunction
    residual_inf: float
    sweeps_used: int
    energy_value: float
    converged: bool
    max_decrease: float = 0.0
    range_violations: tuple[int, ...] = ()


@dataclass(frozen=True)
class ResidualReport:
    """Per-vertex residual of phi^{-1}(L u) + W u - f over U."""

    values: dict[int, float]
    sup: float
    range_violations: tuple[tuple[int, float], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.range_violations


class SolveError(RuntimeError):
    """A solve that was required to converge did not."""

    def __init__(self, message: str, result: SolveResult | None = None):
        super().__init__(message)
        self.result = result


def _sweep_order(g: WeightedGraph, U: list[int], mode: str) -> list[int]:
    if mode == "natural":
        return U
    uset = set(U)
    order: list[int] = []
    seen: set[int] = set()
    seeds = [g.root] if g.root in uset else []
    seeds += sorted(uset)
    for s in seeds:
        if s in seen:
            continue
        seen.add(s)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y, w in g.neighbors(x):
                if w > 0.0 and y in uset and y not in seen:
                    seen.add(y)
                    queue.append(y)
    return order


# F is evaluated as a difference of terms that can sit many orders above
# the root value (a = deg/m grows like 4^x on fast branching graphs), so
# |F| cannot be resolved below a few ulp of those terms.
_FT_NOISE = 8.0 * math.ulp(1.0)


def _scalar_root(a, s_over_m, fx, wx, phi, deriv, lo, hi, t, tol):
    """Root of F(t) = a*t - s_over_m - phi(fx - wx*t) on a certified bracket.

    a = deg/m >= 0 and wx > 0, so F is strictly increasing with
    F(lo) <= 0 <= F(hi).  Newton from the derivative hint is used while
    it stays inside the bracket and keeps halving the step (classic
    safeguarded scheme); otherwise bisect.

    Termination: |F| at its float evaluation noise accepts t outright,
    a Newton step below tol accepts its landing point, and bisection
    refines until the bracket is float-tight.  An absolute width cutoff
    would quantize roots to ~tol and is not used: at degree growth 4^x
    a tol-sized root error is amplified into residuals the sweep loop
    can never pass.  1500 iterations cover halving the widest float64
    bracket down to adjacent floats in pure-bisection mode.
    """
    if t < lo:
        t = lo
    elif t > hi:
        t = hi
    xl, xh = lo, hi
    dxold = xh - xl
    for _ in range(1500):
        at = a * t
        pv = phi(fx - wx * t)
        ft = at - s_over_m - pv
        if abs(ft) <= _FT_NOISE * (abs(at) + abs(s_over_m) + abs(pv)):
            return t
        if ft < 0.0:
            xl = t
        else:
            xh = t
        tn = None
        newton = False
        if deriv is not None:
            d = deriv(fx - wx * t)
            if d is not None and d >= 0.0 and math.isfinite(d):
                fp = a + wx * d
                if fp > 0.0 and math.isfinite(fp) and math.isfinite(ft):
                    cand = t - ft / fp
                    if xl <= cand <= xh and abs(cand - t) <= 0.5 * dxold:
                        tn = cand
                        newton = True
        if tn is None:
            tn = 0.5 * (xl + xh)
            if tn == xl or tn == xh:
                return tn  # bracket is float-tight
        dxold = abs(tn - t)
        if newton and dxold <= tol:
            return tn
        if tn == t:
            return t  # no representable progress
        t = tn
    raise RuntimeError(
        "scalar root finder exhausted its iteration budget; "
        "this indicates a broken bracket and is a bug"
    )


def solve_dirichlet(
    g: WeightedGraph,
    W: Potential,
    nl: Nonlinearity,
    f: VertexFunction,
    U: Iterable[int],
    opts: SolveOptions | None = None,
    start: VertexFunction | None = None,
) -> SolveResult:
    """Minimize the Dirichlet energy over functions supported in U.

    Returns a flagged (never raising) result: ``converged`` is False
    when max_sweeps ran out, when progress stalled at exact zero while
    the residual test still failed, or when L u left ran phi at some
    vertex.  The 1-neighborhood of U is materialized as a side effect.
    """
    opts = opts or SolveOptions()
    u_list = list(dict.fromkeys(U))
    if not u_list:
        return SolveResult(
            u=VertexFunction.zero(),
            residual_inf=0.0,
            sweeps_used=0,
            energy_value=energy_functional(g, W, nl, f, VertexFunction.zero(), ()),
            converged=True,
        )
    order = _sweep_order(g, u_list, opts.sweep_order)
    n_u = len(order)
    index = {x: i for i, x in enumerate(order)}

    m_arr = [g.measure(x) for x in order]
    deg_arr = [g.degree(x) for x in order]
    w_arr = [float(W(x)) for x in order]
    f_arr = [f(x) for x in order]
    for i, x in enumerate(order):
        if w_arr[i] < W.W0:
            raise ValueError(f"W({x}) = {w_arr[i]} violates the certified bound W0 = {W.W0}")

    # in-U neighbor lists; off-U neighbors contribute nothing to S since u = 0 there
    nbr_idx: list[list[int]] = []
    nbr_w: list[list[float]] = []
    for x in order:
        ji: list[int] = []
        jw: list[float] = []
        for y, w in g.neighbors(x):
            j = index.get(y)
            if j is not None and w > 0.0:
                ji.append(j)
                jw.append(w)
        nbr_idx.append(ji)
        nbr_w.append(jw)

    f_sup = max((abs(v) for v in f_arr), default=0.0)
    k_bound = f_sup / W.W0
    lo, hi = -k_bound - 1.0, k_bound + 1.0

    u = [0.0] * n_u
    if start is not None:
        for i, x in enumerate(order):
            # clamp into the certified box so brackets stay valid
            u[i] = min(max(start(x), -k_bound), k_bound)

    phi = nl.phi
    deriv = nl.deriv
    root_tol = opts.scalar_root_tol
    max_dec = 0.0
    sweeps = 0
    converged = False
    resid_inf = math.inf
    violations: tuple[int, ...] = ()
    zero_stalls = 0

    while sweeps < opts.max_sweeps:
        sweeps += 1
        delta = 0.0
        for i in range(n_u):
            ji = nbr_idx[i]
            jw = nbr_w[i]
            s = 0.0
            for k in range(len(ji)):
                s += jw[k] * u[ji[k]]
            mi = m_arr[i]
            t = _scalar_root(
                deg_arr[i] / mi, s / mi, f_arr[i], w_arr[i],
                phi, deriv, lo, hi, u[i], root_tol,
            )
            d = t - u[i]
            if d < 0.0 and -d > max_dec:
                max_dec = -d
            if d < 0.0:
                d = -d
            if d > delta:
                delta = d
            u[i] = t
        # residual checks are gated on sweep stagnation, plus a periodic
        # check so convergence is still detected if updates keep dancing
        # at float granularity above sweep_tol
        if delta > opts.sweep_tol and sweeps % 64 != 0:
            zero_stalls = 0
            continue
        resid_inf, scaled, violations = _residual_arrays(
            g, nl, order, u, index, m_arr, deg_arr, w_arr, f_arr
        )
        if not violations and scaled <= opts.residual_tol:
            converged = True
            break
        if delta == 0.0:
            zero_stalls += 1
            if zero_stalls >= 2:
                break  # exact fixed point of the scalar solves; no further progress
        else:
            zero_stalls = 0

    if not converged:
        # measure at the final iterate; mid-loop values may be stale
        resid_inf, _, violations = _residual_arrays(
            g, nl, order, u, index, m_arr, deg_arr, w_arr, f_arr
        )

    u_fn = VertexFunction({x: u[i] for i, x in enumerate(order)})
    e_val = energy_functional(g, W, nl, f, u_fn, u_list)
    return SolveResult(
        u=u_fn,
        residual_inf=resid_inf,
        sweeps_used=sweeps,
        energy_value=e_val,
        converged=converged,
        max_decrease=max_dec,
        range_violations=violations,
    )


def _residual_arrays(g, nl, order, u, index, m_arr, deg_arr, w_arr, f_arr):
    """Raw and data-scaled sup residual over the solve arrays."""
    sup = 0.0
    scaled = 0.0
    violations: list[int] = []
    for i, x in enumerate(order):
        s = 0.0
        for y, w in g.neighbors(x):
            j = index.get(y)
            if j is not None:
                s += w * u[j]
        lu = (deg_arr[i] * u[i] - s) / m_arr[i]
        if not nl.contains(lu):
            violations.append(x)
            continue
        try:
            r = nl.inverse(lu) + w_arr[i] * u[i] - f_arr[i]
        except RangeError:
            # inside ran phi mathematically but past float representability
            violations.append(x)
            continue
        r = abs(r)
        if r > sup:
            sup = r
        rs = r / (1.0 + abs(f_arr[i]))
        if rs > scaled:
            scaled = rs
    return sup, scaled, tuple(violations)


def energy_functional(
    g: WeightedGraph,
    W: Potential,
    nl: Nonlinearity,
    f: VertexFunction,
    u: VertexFunction,
    U: Iterable[int],
) -> float:
    """E(u) = Q(u, u) + sum_{x in U union supp f} Phi(f(x) - W(x) u(x)) m(x) / W(x).

    Off U union supp f both u and f vanish, so the omitted terms are
    Phi(0) = 0 and the sum is exact.
    """
    q = energy(g, u, u)
    acc = 0.0
    for x in set(U) | set(f.support):
        wx = W(x)
        acc += nl.antiderivative(f(x) - wx * u(x)) * g.measure(x) / wx
    return q + acc


def residual(
    g: WeightedGraph,
    W: Potential,
    nl: Nonlinearity,
    f: VertexFunction,
    u: VertexFunction,
    U: Iterable[int],
) -> ResidualReport:
    """Pointwise residual phi^{-1}(L u) + W u - f over U.

    A vertex where L u falls outside ran phi is reported as a range
    violation instead of a number; the sup is taken over the vertices
    with a defined residual.
    """
    values: dict[int, float] = {}
    violations: list[tuple[int, float]] = []
    for x in dict.fromkeys(U):
        lu = laplacian_apply(g, u, x)
        if not nl.contains(lu):
            violations.append((x, lu))
            continue
        try:
            values[x] = nl.inverse(lu) + W(x) * u(x) - f(x)
        except RangeError:
            violations.append((x, lu))
    sup = max((abs(v) for v in values.values()), default=0.0)
    return ResidualReport(values=values, sup=sup, range_violations=tuple(violations))
