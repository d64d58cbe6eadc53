"""Graded radial grids and P1 assembly of the weighted half-line mode forms.

Every operator built here is a symmetric tridiagonal stiffness matrix plus a
positive lumped-mass diagonal, discretizing quadratic forms of the shape

    q[u] = int W(r) |u'|^2 dr + m^2 int W(r) |u|^2 / r^2 dr  (+ potential)

or the chiral variant int W |u' - s*m*u/r|^2 dr, on nodes clustered near the
origin.  Weight kinds (s = +1/-1 is the spin sign; W includes the radial
measure r):

    exact-h      W = e^{2 s h(r)} r         (h a tabulated PotentialH)
    model        W = (1+r)^{2 s alpha} r
    smooth       W = (1+r^2)^{s alpha} r
    canonical-w  W = r * max(1, r)^{2 s alpha}

The transformed operator T_alpha (plain Lebesgue mass, inverse-square
potentials -1/(4r^2) inside r=1 and (alpha^2-1/4)/r^2 outside, and a point
term -alpha at r=1) has its own assembler: its near-origin -r^{-2}/4 term
sits exactly at the Hardy threshold and must be integrated analytically
against the hat functions, midpoint sampling there produces spurious
negative eigenvalues.

Quadrature: two-point Gauss per element for the mode forms (each Gauss point
contributes a rank-one Gram term, so assembled forms are nonnegative by
construction when v=0); node-sampled lumped mass M_ii = W(r_i) * trapezoid
weight; potentials enter as the diagonal v_i * M_ii.  With that choice a
potential is exactly a diagonal shift of the mass-symmetrized matrix.

Boundary handling: Dirichlet at r_max always (truncation then raises
eigenvalues, so negative-spectrum quantities are approached from above); the
inner node carries a free (natural) value for m=0 and a Dirichlet condition
for |m| >= 1, whose r^{-2} term forces decay at the origin.  T_alpha keeps
the inner value free with an exact compensation term (see assemble_T_alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import PotentialH

WEIGHT_KINDS = ("exact-h", "model", "smooth", "canonical-w")

# two-point Gauss-Legendre on the reference element [0, 1]
_GAUSS_X = (0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0))
_GAUSS_W = (0.5, 0.5)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing nodes on (0, r_max] with trapezoid weights."""

    r: np.ndarray
    w: np.ndarray
    r_max: float
    grading: float
    idx_one: int | None  # index of the node pinned to exactly 1.0

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def contains_one(self) -> bool:
        return self.idx_one is not None

    def spacing(self) -> np.ndarray:
        return np.diff(self.r)


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Assembled pencil (stiffness, mass) restricted to the free nodes.

    ``diag``/``off`` hold the symmetric tridiagonal stiffness, ``mass`` the
    lumped positive diagonal, ``nodes`` the radii of the degrees of freedom.
    ``idx_one`` is the position of the r=1 node among the dofs (None if that
    node is absent or constrained), ``left_natural`` says whether the first
    dof is the innermost grid node carrying a free boundary value.
    """

    diag: np.ndarray
    off: np.ndarray
    mass: np.ndarray
    nodes: np.ndarray
    left_natural: bool
    idx_one: int | None
    meta: dict

    @property
    def n_dof(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.off.size:
            a += np.diag(self.off, 1) + np.diag(self.off, -1)
        return a

    def form_value(self, u: np.ndarray) -> float:
        """Quadratic form u^T K u (u given on the dofs)."""
        u = np.asarray(u, dtype=float)
        s = float(np.sum(self.diag * u * u))
        if self.off.size:
            s += 2.0 * float(np.sum(self.off * u[:-1] * u[1:]))
        return s


def make_grid(r_max: float, n: int, grading: float = 1.003) -> RadialGrid:
    """Geometrically graded nodes 0 < r_1 < ... < r_n = r_max with a node at 1.

    Spacings grow by the factor ``grading`` away from the origin
    (h_1 = r_max (g-1)/(g^n - 1)); ``grading=1`` falls back to uniform
    spacing.  The node nearest 1.0 is pinned to exactly 1.0 by rescaling the
    two surrounding sections, so interface terms and Dirichlet splits land on
    a node.  Quadrature weights are the trapezoid rule on [r_1, r_max].
    """
    if not r_max > 1.0:
        raise ValueError("r_max must exceed 1")
    if n < 64:
        raise ValueError("need at least 64 nodes")
    if grading < 1.0:
        raise ValueError("grading must be >= 1")
    if grading > 1.0:
        h1 = r_max * (grading - 1.0) / (grading**n - 1.0)
        steps = h1 * grading ** np.arange(n)
        r = np.cumsum(steps)
        r[-1] = r_max
    else:
        r = r_max * np.arange(1, n + 1) / n

    # pin the node nearest 1 (never the last one) to exactly 1
    k = int(np.argmin(np.abs(r - 1.0)))
    k = min(k, n - 2)
    rk = r[k]
    r[: k + 1] *= 1.0 / rk
    r[k + 1:] = 1.0 + (r[k + 1:] - rk) * (r_max - 1.0) / (r_max - rk)
    r[k] = 1.0
    r[-1] = r_max

    w = np.empty(n)
    w[0] = 0.5 * (r[1] - r[0])
    w[-1] = 0.5 * (r[-1] - r[-2])
    w[1:-1] = 0.5 * (r[2:] - r[:-2])
    return RadialGrid(r=r, w=w, r_max=float(r_max), grading=float(grading),
                      idx_one=k)


def _sign_value(sign) -> float:
    if sign in ("+", +1, 1.0):
        return 1.0
    if sign in ("-", -1, -1.0):
        return -1.0
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def weight_values(weight_kind: str, alpha: float, sign, r: np.ndarray,
                  potential: PotentialH | None = None) -> np.ndarray:
    """The measure weight W(r) (including the factor r) at the points r."""
    s = _sign_value(sign)
    r = np.asarray(r, dtype=float)
    if weight_kind == "exact-h":
        if potential is None:
            raise ValueError("exact-h weight needs a tabulated PotentialH")
        return np.exp(2.0 * s * potential(r)) * r
    if weight_kind == "model":
        return (1.0 + r) ** (2.0 * s * alpha) * r
    if weight_kind == "smooth":
        return (1.0 + r * r) ** (s * alpha) * r
    if weight_kind == "canonical-w":
        return np.maximum(1.0, r) ** (2.0 * s * alpha) * r
    raise ValueError(f"unknown weight kind {weight_kind!r}")


def _node_samples(v, grid: RadialGrid) -> np.ndarray | None:
    if v is None:
        return None
    if callable(v):
        return np.asarray(v(grid.r), dtype=float)
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        return np.full(grid.n, float(v))
    if v.shape != grid.r.shape:
        raise ValueError("potential samples must match the grid nodes")
    return v


def _restrict(grid: RadialGrid, diag, off, mass, left_dirichlet: bool,
              meta: dict) -> ModeOperator:
    """Drop constrained boundary nodes (always the last; the first if asked)."""
    lo = 1 if left_dirichlet else 0
    hi = grid.n - 1
    idx_one = grid.idx_one
    if idx_one is not None:
        idx_one = idx_one - lo
        if not 0 <= idx_one < hi - lo:
            idx_one = None
    return ModeOperator(
        diag=diag[lo:hi], off=off[lo:hi - 1], mass=mass[lo:hi],
        nodes=grid.r[lo:hi].copy(), left_natural=not left_dirichlet,
        idx_one=idx_one, meta=meta)


def assemble_mode(grid: RadialGrid, weight_kind: str, alpha: float, sign,
                  m: int, v=None, *, chiral: bool = False,
                  potential: PotentialH | None = None) -> ModeOperator:
    """Stiffness/mass pencil for one angular mode of a weighted Pauli form.

    Default is the expanded form W(|u'|^2 + m^2 u^2/r^2); ``chiral=True``
    assembles W |u' - s*m*u/r|^2 instead (s the spin sign), the two differ by
    the integration-by-parts cross term.  ``v`` may be None, a scalar, node
    samples, or a callable; it enters as a lumped diagonal.
    """
    if weight_kind not in WEIGHT_KINDS:
        raise ValueError(f"unknown weight kind {weight_kind!r}")
    if m != int(m):
        raise ValueError("mode number m must be an integer")
    m = int(m)
    s = _sign_value(sign)

    r = grid.r
    n = grid.n
    a, b = r[:-1], r[1:]
    h = b - a

    diag = np.zeros(n)
    off_acc = np.zeros(n - 1)
    for x, om in zip(_GAUSS_X, _GAUSS_W):
        rg = a + x * h
        wg = weight_values(weight_kind, alpha, sign, rg, potential)
        scale = om * h * wg
        if chiral:
            # rank-one D phi_i * D phi_j with D = d/dr - s*m/r
            dl = -1.0 / h - s * m * (1.0 - x) / rg
            dr = 1.0 / h - s * m * x / rg
            diag[:-1] += scale * dl * dl
            diag[1:] += scale * dr * dr
            off_acc += scale * dl * dr
        else:
            grad = scale / (h * h)
            diag[:-1] += grad
            diag[1:] += grad
            off_acc -= grad
            if m != 0:
                pot = scale * (m / rg) ** 2
                diag[:-1] += pot * (1.0 - x) ** 2
                diag[1:] += pot * x * x
                off_acc += pot * x * (1.0 - x)

    mass = weight_values(weight_kind, alpha, sign, r, potential) * grid.w
    v_nodes = _node_samples(v, grid)
    if v_nodes is not None:
        diag = diag + v_nodes * mass

    sign_str = "+" if s > 0 else "-"
    meta = {"m": m, "sign": sign_str, "weight": weight_kind, "alpha": alpha,
            "chiral": chiral, "has_v": v_nodes is not None}
    return _restrict(grid, diag, off_acc, mass, left_dirichlet=(m != 0),
                     meta=meta)


def assemble_h_minus(grid: RadialGrid, alpha: float, v=None) -> ModeOperator:
    """The radial m=0 operator in L^2((1+r)^{-2 alpha} r dr)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return assemble_mode(grid, "model", alpha, "-", 0, v)


def _inv_sq_elements(a: np.ndarray, b: np.ndarray):
    """Exact integrals of hat-function products against r^{-2} over [a, b].

    Returns (LL, LR, RR) for the left/right hats N_L=(b-r)/h, N_R=(r-a)/h.
    The closed forms cancel to O(u^3), u = h/a, so thin elements switch to
    the series in u (relative error ~u^4 at the 0.05 crossover, far below
    the O(h^2) discretization error).
    """
    h = b - a
    u = h / a
    with np.errstate(invalid="ignore", divide="ignore"):
        L = np.log1p(u)
        h2 = h * h
        exact_ll = (b * h / a + h - 2.0 * b * L) / h2
        exact_rr = (h + a * h / b - 2.0 * a * L) / h2
        exact_lr = ((a + b) * L - 2.0 * h) / h2
    ser_ll = (u / 3.0 - u * u / 6.0 + u**3 / 10.0 - u**4 / 15.0
              + u**5 / 21.0) / a
    ser_rr = (u / 3.0 - u * u / 2.0 + 0.6 * u**3 - 2.0 * u**4 / 3.0
              + 5.0 * u**5 / 7.0) / a
    ser_lr = (u / 6.0 - u * u / 6.0 + 0.15 * u**3 - 2.0 * u**4 / 15.0
              + 5.0 * u**5 / 42.0) / a
    thin = u < 0.05
    return (np.where(thin, ser_ll, exact_ll),
            np.where(thin, ser_lr, exact_lr),
            np.where(thin, ser_rr, exact_rr))


def assemble_T_alpha(grid: RadialGrid, alpha: float, v=None) -> ModeOperator:
    """The half-line comparison operator with the -alpha point term at r=1.

    Form: int |u'|^2 - alpha |u(1)|^2 - (1/4) int_{r<1} u^2/r^2
    + (alpha^2 - 1/4) int_{r>1} u^2/r^2 (+ potential), plain dr mass,
    Dirichlet at r_max, free inner value.

    On (0, 1) the form sits exactly at the Hardy threshold and its natural
    states behave like sqrt(r); plain hats cannot follow that kink on the
    first few elements (whose ratios h_i/r_i ~ 1/i never refine), which
    leaves an n-independent spectral bias ~1e-4.  The inner elements
    therefore use shape functions sqrt(r)*(linear).  Substituting
    u = sqrt(r) psi gives, exactly,

        int_a^b (|u'|^2 - u^2/(4 r^2)) dr
            = int_a^b r |psi'|^2 dr + psi(b)^2/2 - psi(a)^2/2,

    so with psi piecewise linear the singular part integrates in closed
    form: each inner element contributes the rank-one stiffness
    (b^2-a^2)/2 * d^2, d = (psi_b - psi_a)/h, and the psi^2/2 boundary
    terms telescope to +u(1)^2/2 at the interface.  Dropping the boundary
    piece at r_1 selects the form closure (the operator the canonical-weight
    conjugation produces), and nonnegativity of the assembled matrix is
    exact rather than approximate.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if not grid.contains_one:
        raise ValueError("grid has no node at r=1")

    r = grid.r
    n = grid.n
    k1 = grid.idx_one
    a, b = r[:-1], r[1:]
    h = b - a

    diag = np.zeros(n)
    off = np.zeros(n - 1)

    # inner elements (b <= 1): u = sqrt(r)(c + d r), exact closed form
    ai, bi = a[:k1], b[:k1]
    s = (bi * bi - ai * ai) / (2.0 * (bi - ai) ** 2)
    diag[:k1] += s / ai
    diag[1:k1 + 1] += s / bi
    off[:k1] -= s / np.sqrt(ai * bi)
    diag[k1] += 0.5  # telescoped psi^2/2 gauge term at the interface

    # outer elements (a >= 1): plain hats, exact r^{-2} integrals
    ao, bo, ho = a[k1:], b[k1:], h[k1:]
    grad = 1.0 / ho
    diag[k1:-1] += grad
    diag[k1 + 1:] += grad
    off[k1:] -= grad
    ll, lr, rr = _inv_sq_elements(ao, bo)
    coef = alpha * alpha - 0.25
    diag[k1:-1] += coef * ll
    diag[k1 + 1:] += coef * rr
    off[k1:] += coef * lr

    diag[k1] -= alpha

    mass = grid.w.copy()
    v_nodes = _node_samples(v, grid)
    if v_nodes is not None:
        diag = diag + v_nodes * mass

    meta = {"m": 0, "sign": "-", "weight": "T-alpha", "alpha": alpha,
            "chiral": False, "has_v": v_nodes is not None}
    return _restrict(grid, diag, off, mass, left_dirichlet=False, meta=meta)


def dirichlet_split(op: ModeOperator) -> tuple[ModeOperator, ModeOperator]:
    """Impose u(1)=0: delete the r=1 row/column, return (inner, outer) parts."""
    k = op.idx_one
    if k is None:
        raise ValueError("operator has no free node at r=1 to split at")
    meta = dict(op.meta, split="dirichlet-at-1")
    inner = ModeOperator(
        diag=op.diag[:k], off=op.off[:max(k - 1, 0)], mass=op.mass[:k],
        nodes=op.nodes[:k], left_natural=op.left_natural, idx_one=None,
        meta=dict(meta, part="inner"))
    outer = ModeOperator(
        diag=op.diag[k + 1:], off=op.off[k + 1:], mass=op.mass[k + 1:],
        nodes=op.nodes[k + 1:], left_natural=False, idx_one=None,
        meta=dict(meta, part="outer"))
    return inner, outer
