"""Flow calculus on trees.

A lambda-flow to a vertex x is a nonzero function that is harmonic at every
interior vertex except x and satisfies the spectral boundary condition at
every boundary vertex except x.  On a tree the solution space is one
dimensional; solve_flow builds it by a transfer recursion over the tree
rooted at x, solve_flow_dense solves the equivalent square linear system as
an independent oracle.  sigma(g, x) is the smallest lambda whose flow
vanishes at x with positive gradients toward x; it is computed either from
the spectral gap of the doubled graph or by recursive bisection, and the two
routes are kept strictly separate so they can check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    GraphValidationError,
    InternalFault,
    NearSingular,
    NormalizationFailure,
    ResonantLambda,
)
from .graphs import BoundaryGraph, branch, double_at, leaves
from .spectral import laplacian_apply, laplacian_matrix, steklov_spectrum


@dataclass(frozen=True)
class TransferPair:
    """Subtree solution summary, relative to the value at the subtree root.

    c scales the value induced at the parent, d the gradient flowing into
    the parent edge; c + d = 1 by construction and a leaf carries
    (1 - lambda, lambda).
    """

    c: float
    d: float


@dataclass(frozen=True)
class LambdaFlow:
    lam: float
    target: int
    norm_vertex: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class SigmaResult:
    sigma: float
    method: str
    witness: LambdaFlow | None
    sigma1: float | None


def _require_flow_tree(g: BoundaryGraph, x: int) -> None:
    if not g.is_tree:
        raise GraphValidationError("flows are defined on trees")
    if g.boundary != leaves(g):
        raise GraphValidationError("flow calculus needs boundary == leaves")
    if not 0 <= x < g.n:
        raise GraphValidationError(f"vertex {x} out of range")


def default_norm_vertex(g: BoundaryGraph, x: int) -> int:
    """Smallest boundary id different from x."""
    cands = sorted(g.boundary - {x})
    if not cands:
        raise GraphValidationError("no boundary vertex available for normalization")
    return cands[0]


def _rooted(g: BoundaryGraph, x: int) -> tuple[list[int], list[int]]:
    """Parent array and a preorder listing of the tree rooted at x."""
    parent = [-2] * g.n
    parent[x] = -1
    order = [x]
    for u in order:
        for v in g.neighbors(u):
            if parent[v] == -2:
                parent[v] = u
                order.append(v)
    return parent, order


def _resonant(c: float, d: float, tol: Tolerances) -> bool:
    return abs(c) < tol.resonance * max(1.0, abs(c) + abs(d))


def transfer_pairs(
    g: BoundaryGraph, x: int, lam: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> dict[int, TransferPair]:
    """Transfer pair of every subtree hanging below x."""
    _require_flow_tree(g, x)
    parent, order = _rooted(g, x)
    pairs: dict[int, TransferPair] = {}
    for u in reversed(order):
        if u == x:
            continue
        kids = [v for v in g.neighbors(u) if v != parent[u]]
        if not kids:
            pairs[u] = TransferPair(c=1.0 - lam, d=lam)
            continue
        total = 0.0
        for k in kids:
            pk = pairs[k]
            if _resonant(pk.c, pk.d, tol):
                raise ResonantLambda(lam, k, pk.c)
            total += pk.d / pk.c
        pairs[u] = TransferPair(c=1.0 - total, d=total)
    return pairs


def solve_flow(
    g: BoundaryGraph,
    x: int,
    lam: float,
    w: int | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> LambdaFlow:
    """Lambda-flow to x via the transfer recursion, normalized to f(w) = 1."""
    _require_flow_tree(g, x)
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if w is None:
        w = default_norm_vertex(g, x)
    if w == x or w not in g.boundary:
        raise GraphValidationError(f"normalization vertex {w} must be boundary != x")

    parent, order = _rooted(g, x)
    pairs = transfer_pairs(g, x, lam, tol)
    f = np.zeros(g.n)
    scale: dict[int, float] = {}
    kids_x = [v for v in g.neighbors(x)]
    if len(kids_x) == 1:
        # boundary target: the single subtree keeps its free scale, the
        # value at x may legitimately vanish (that zero is sigma)
        scale[kids_x[0]] = 1.0
        f[x] = pairs[kids_x[0]].c
    else:
        # interior target: reconcile all subtrees to a common value at x
        for k in kids_x:
            pk = pairs[k]
            if _resonant(pk.c, pk.d, tol):
                raise ResonantLambda(lam, k, pk.c)
            scale[k] = 1.0 / pk.c
        f[x] = 1.0
    for u in order[1:]:
        f[u] = scale[u]
        for v in g.neighbors(u):
            if v != parent[u]:
                scale[v] = f[u] / pairs[v].c

    fw = f[w]
    if abs(fw) < 1e-15 * max(1.0, float(np.max(np.abs(f)))):
        raise NormalizationFailure(
            f"flow vanishes at normalization vertex {w} (lambda={lam!r})"
        )
    f = f / fw
    flow = LambdaFlow(lam=lam, target=x, norm_vertex=w, values=f)
    residual = verify_flow(g, flow)
    bound = tol.flow_residual * max(1.0, float(np.max(np.abs(f))))
    if residual > bound:
        raise InternalFault(
            f"transfer flow residual {residual:.3e} exceeds {bound:.3e} "
            f"at lambda={lam!r}"
        )
    return flow


def solve_flow_dense(
    g: BoundaryGraph,
    x: int,
    lam: float,
    w: int | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> LambdaFlow:
    """Independent oracle: assemble and solve the flow system densely.

    Accepts non-tree graphs as well; resonances surface as a near-singular
    system.
    """
    if not 0 <= x < g.n:
        raise GraphValidationError(f"vertex {x} out of range")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if w is None:
        w = default_norm_vertex(g, x)
    if w == x or w not in g.boundary:
        raise GraphValidationError(f"normalization vertex {w} must be boundary != x")

    lap = laplacian_matrix(g)
    rows = []
    rhs = []
    for v in range(g.n):
        if v == x:
            continue
        row = lap[v].copy()
        if v in g.boundary:
            row[v] -= lam
        rows.append(row)
        rhs.append(0.0)
    norm_row = np.zeros(g.n)
    norm_row[w] = 1.0
    rows.append(norm_row)
    rhs.append(1.0)
    a = np.vstack(rows)
    b = np.array(rhs)
    sol, _, _, svals = np.linalg.lstsq(a, b, rcond=None)
    if svals[-1] < 1e-10 * svals[0]:
        raise NearSingular(lam, float(svals[-1]))
    residual = float(np.max(np.abs(a @ sol - b)))
    bound = tol.dense_flow_residual * max(1.0, float(np.max(np.abs(sol))))
    if residual > bound:
        raise NearSingular(lam, float(svals[-1]))
    return LambdaFlow(lam=lam, target=x, norm_vertex=w, values=sol)


def verify_flow(g: BoundaryGraph, flow: LambdaFlow) -> float:
    """Max residual of the defining equations away from the target."""
    f = flow.values
    lap = laplacian_apply(g, f)
    res = 0.0
    for v in range(g.n):
        if v == flow.target:
            continue
        if v in g.boundary:
            res = max(res, abs(lap[v] - flow.lam * f[v]))
        else:
            res = max(res, abs(lap[v]))
    return res


def edge_flow_residual(g: BoundaryGraph, flow: LambdaFlow) -> float:
    """Max gap in the branch identity: the gradient on each edge toward the
    target equals lambda times the boundary mass hanging behind it."""
    _require_flow_tree(g, flow.target)
    f = flow.values
    parent, order = _rooted(g, flow.target)
    bsum = [0.0] * g.n
    res = 0.0
    for u in reversed(order):
        if u in g.boundary and u != flow.target:
            bsum[u] += f[u]
        if u == flow.target:
            continue
        p = parent[u]
        grad = f[u] - f[p]
        res = max(res, abs(grad - flow.lam * bsum[u]))
        bsum[p] += bsum[u]
    return res


def positivity_check(
    g: BoundaryGraph, flow: LambdaFlow, tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """True iff gradients toward the target and boundary values are positive.

    The two sides are equivalent for lambda > 0; a clear disagreement is a
    fault, not a result.
    """
    if flow.lam <= 0:
        raise ValueError("positivity is defined for lambda > 0")
    _require_flow_tree(g, flow.target)
    f = flow.values
    parent, order = _rooted(g, flow.target)
    min_grad = math.inf
    for u in order[1:]:
        min_grad = min(min_grad, f[u] - f[parent[u]])
    min_bnd = min(f[z] for z in g.boundary if z != flow.target)
    slack = tol.sigma_witness
    grad_side = bool(min_grad > -slack)
    bnd_side = bool(min_bnd > -slack)
    if grad_side != bnd_side:
        clear = (min_grad > slack and min_bnd < -slack) or (
            min_bnd > slack and min_grad < -slack
        )
        if clear:
            raise InternalFault(
                f"positivity equivalence mismatch: min gradient {min_grad:.3e}, "
                f"min boundary value {min_bnd:.3e} at lambda={flow.lam!r}"
            )
    return grad_side and bnd_side


def _flow_with_retry(
    g: BoundaryGraph, x: int, lam: float, w: int, tol: Tolerances
) -> LambdaFlow:
    try:
        return solve_flow(g, x, lam, w, tol)
    except ResonantLambda:
        # measure-zero collision with a branch resonance: nudge once
        return solve_flow(g, x, lam + 1e-10, w, tol)


def _check_witness(
    g: BoundaryGraph, witness: LambdaFlow, sig: float, tol: Tolerances
) -> None:
    fx = float(witness.values[witness.target])
    if abs(fx) > tol.sigma_witness:
        raise InternalFault(
            f"sigma witness has f(x) = {fx:.3e} at lambda={sig!r}"
        )
    if sig > 0 and not positivity_check(g, witness, tol):
        raise InternalFault(f"sigma witness fails positivity at lambda={sig!r}")


def _sigma1(g: BoundaryGraph, x: int, tol: Tolerances) -> float:
    """Smallest branch sigma at the neighbor of x; inf for the single edge."""
    if g.n == 2:
        return math.inf
    (x1,) = g.neighbors(x)
    best = math.inf
    for j in g.neighbors(x1):
        if j == x:
            continue
        ref = branch(g, j, x1, closed=True)
        sub, relabel = ref.as_graph(g)
        best = min(best, _sigma_bisect(sub, relabel[x1], tol).sigma)
    return best


def _sigma_bisect(g: BoundaryGraph, x: int, tol: Tolerances) -> SigmaResult:
    w = default_norm_vertex(g, x)
    if g.n == 2:
        witness = solve_flow(g, x, 1.0, w, tol)
        return SigmaResult(sigma=1.0, method="bisection", witness=witness, sigma1=None)
    sigma1 = _sigma1(g, x, tol)

    def fx(lam: float) -> float:
        return float(_flow_with_retry(g, x, lam, w, tol).values[x])

    bracket = None
    for npts in (64, 256):
        prev_lam, prev_val = 0.0, 1.0  # constant flow at lambda = 0
        for i in range(1, npts):
            lam = sigma1 * i / npts
            val = fx(lam)
            if prev_val > 0.0 >= val:
                bracket = (prev_lam, lam)
                break
            prev_lam, prev_val = lam, val
        if bracket:
            break
    if bracket is None:
        return _sigma_no_bracket(g, x, w, sigma1, tol)

    lo, hi = bracket
    while hi - lo > tol.bisection:
        mid = (lo + hi) / 2.0
        if fx(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    sig = (lo + hi) / 2.0
    witness = _flow_with_retry(g, x, sig, w, tol)
    _check_witness(g, witness, sig, tol)
    return SigmaResult(sigma=sig, method="bisection", witness=witness, sigma1=sigma1)


def _sigma_no_bracket(
    g: BoundaryGraph, x: int, w: int, sigma1: float, tol: Tolerances
) -> SigmaResult:
    # A zero below sigma1 is guaranteed; before declaring a fault,
    # cross-examine the doubling route.  If its witness also fails, report
    # the documented infinity sentinel instead of a wrong number.
    try:
        doubled = double_at(g, x)
        lam2 = steklov_spectrum(doubled.graph, tol).lambda2
        witness = _flow_with_retry(g, x, lam2, w, tol)
        _check_witness(g, witness, lam2, tol)
    except (InternalFault, ResonantLambda, NormalizationFailure):
        return SigmaResult(
            sigma=math.inf, method="bisection", witness=None, sigma1=sigma1
        )
    raise InternalFault(
        f"bisection found no sign change below sigma1={sigma1!r} although the "
        f"doubling route gives sigma={lam2!r}; grid logic is faulty"
    )


def sigma(
    g: BoundaryGraph,
    x: int,
    method: str = "doubling",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SigmaResult:
    """Smallest lambda whose flow vanishes at x with positive gradients.

    method "doubling" reads it off the spectral gap of the graph doubled at
    x (one eigensolve); method "bisection" scans the flow value at x below
    the recursive branch bound sigma1.
    """
    _require_flow_tree(g, x)
    if x not in g.boundary:
        raise GraphValidationError("sigma is evaluated at boundary vertices only")
    if method == "bisection":
        return _sigma_bisect(g, x, tol)
    if method != "doubling":
        raise ValueError(f"unknown sigma method {method!r}")
    w = default_norm_vertex(g, x)
    if g.n == 2:
        witness = solve_flow(g, x, 1.0, w, tol)
        return SigmaResult(sigma=1.0, method="doubling", witness=witness, sigma1=None)
    doubled = double_at(g, x)
    sig = steklov_spectrum(doubled.graph, tol).lambda2
    witness = _flow_with_retry(g, x, sig, w, tol)
    _check_witness(g, witness, sig, tol)
    return SigmaResult(sigma=sig, method="doubling", witness=witness, sigma1=None)


def sigma_upper_bound(
    g: BoundaryGraph, x: int, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """The recursive branch bound sigma1 (resonance-free zone is [0, sigma1))."""
    _require_flow_tree(g, x)
    if x not in g.boundary:
        raise GraphValidationError("sigma1 is defined at boundary vertices only")
    return _sigma1(g, x, tol)


def flow_to_json(g: BoundaryGraph, flow: LambdaFlow) -> dict:
    doc = {
        "lambda": float(flow.lam),
        "target": flow.target,
        "norm_vertex": flow.norm_vertex,
        "values": [float(v) for v in flow.values],
        "residual_system": verify_flow(g, flow),
    }
    if g.is_tree:
        doc["residual_edge_flow"] = edge_flow_residual(g, flow)
    return doc
