"""Fourier multiplier symbols of the fifth-order model and their bounds.

The dispersive symbol family is built from the denominator polynomial
varphi(xi) = 1 + gamma1*xi^2 + delta1*xi^4 (strictly positive in the
well-posed regime):

    phi(xi)   = xi*(1 - gamma2*xi^2 + delta2*xi^4) / varphi(xi)   (odd)
    psi(xi)   = xi / varphi(xi)                                   (odd)
    tau(xi)   = (3*xi - 4*gamma*xi^3) / (4*varphi(xi))            (odd)
    omega(xi) = |xi| / (1 + xi^2)                                 (even)

Besides pointwise evaluation and application to fields, the module provides
supremum bounds of the quotient expressions the bilinear/trilinear operator
estimates hinge on, and Monte-Carlo scans of the corresponding operator-norm
ratios on random fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .coefficients import Bbm5Coefficients
from .spectral import (
    Field,
    Grid,
    RegimeError,
    dealiased_product2,
    dealiased_product3,
    sobolev_norm,
    spectral_derivative,
)

__all__ = [
    "Symbol",
    "eval_symbol",
    "apply_symbol",
    "apply_symbol_real",
    "sup_bound",
    "empirical_operator_norm",
    "random_hs_field",
]

_KINDS = {
    "phi": -1,
    "psi": -1,
    "tau": -1,
    "omega": +1,
    "varphi_denominator": +1,
}

_NEEDS_COEFFS = {"phi", "psi", "tau", "varphi_denominator"}


def _varphi(xi, c: Bbm5Coefficients):
    return 1.0 + c.gamma1 * xi**2 + c.delta1 * xi**4


def eval_symbol(kind: str, xi, c: Bbm5Coefficients | None = None):
    """Pointwise symbol value; vectorized over xi."""
    xi = np.asarray(xi, dtype=np.float64)
    if kind in _NEEDS_COEFFS:
        if c is None:
            raise ValueError(f"symbol {kind!r} needs coefficients")
        if kind != "varphi_denominator" and not c.wellposed_regime:
            raise RegimeError(f"symbol {kind!r} requires gamma1, delta1 > 0")
    if kind == "omega":
        return np.abs(xi) / (1.0 + xi**2)
    if kind == "varphi_denominator":
        return _varphi(xi, c)
    if kind == "psi":
        return xi / _varphi(xi, c)
    if kind == "tau":
        return (3.0 * xi - 4.0 * c.gamma * xi**3) / (4.0 * _varphi(xi, c))
    if kind == "phi":
        return xi * (1.0 - c.gamma2 * xi**2 + c.delta2 * xi**4) / _varphi(xi, c)
    raise ValueError(f"unknown symbol kind {kind!r}")


@dataclass(frozen=True)
class Symbol:
    """A named multiplier with parity marker and per-grid value cache."""

    kind: str
    coefficients: Bbm5Coefficients | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind in _NEEDS_COEFFS and self.coefficients is None:
            raise ValueError(f"symbol {self.kind!r} needs coefficients")

    @property
    def parity(self) -> int:
        """+1 for even symbols, -1 for odd."""
        return _KINDS[self.kind]

    def __call__(self, xi):
        return eval_symbol(self.kind, xi, self.coefficients)

    def on_grid(self, grid: Grid) -> np.ndarray:
        """Symbol values on the grid's wavenumber lattice, cached per grid.

        Odd symbols are zeroed at the Nyquist slot so that application to a
        real field stays real after the -i composition.
        """
        tab = self._cache.get(grid)
        if tab is None:
            tab = np.asarray(self(grid.wavenumbers))
            if self.parity == -1:
                tab[grid._nyquist_index] = 0.0
            tab.setflags(write=False)
            self._cache[grid] = tab
        return tab


def apply_symbol(sym: Symbol, f: Field) -> Field:
    """Literal pointwise multiplication of the spectral coefficients.

    For odd symbols the raw result is purely imaginary on real input; the
    evolution composes it with -i (see apply_symbol_real).
    """
    return Field.from_spectral(f.grid, sym.on_grid(f.grid) * f.spectral)


def apply_symbol_real(sym: Symbol, f: Field) -> Field:
    """-i-composed application of an odd symbol; maps real fields to real."""
    if sym.parity != -1:
        raise ValueError("the -i composition applies to odd symbols only")
    return Field.from_spectral(f.grid, -1j * sym.on_grid(f.grid) * f.spectral)


# ---------------------------------------------------------------------------
# Supremum bounds
# ---------------------------------------------------------------------------

_EXPRESSIONS = {}


def _expression(name):
    def deco(fn):
        _EXPRESSIONS[name] = fn
        return fn

    return deco


@_expression("xi_psi")
def _xi_psi(xi, c):
    return xi**2 / _varphi(xi, c)


@_expression("xi_tau")
def _xi_tau(xi, c):
    return np.abs(3.0 * xi**2 - 4.0 * c.gamma * xi**4) / (4.0 * _varphi(xi, c))


@_expression("omega")
def _omega(xi, c):
    return np.abs(xi) / (1.0 + xi**2)


@_expression("tau_over_omega")
def _tau_over_omega(xi, c):
    xi = np.asarray(xi, dtype=np.float64)
    num = np.abs(3.0 * xi - 4.0 * c.gamma * xi**3) / (4.0 * _varphi(xi, c))
    om = np.abs(xi) / (1.0 + xi**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(xi == 0.0, 0.75, num / om)
    return r


@_expression("psi_over_omega")
def _psi_over_omega(xi, c):
    xi = np.asarray(xi, dtype=np.float64)
    num = np.abs(xi) / _varphi(xi, c)
    om = np.abs(xi) / (1.0 + xi**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(xi == 0.0, 1.0, num / om)
    return r


@_expression("bracket_xi_psi_over_omega")
def _bracket_xi_psi_over_omega(xi, c):
    # <xi>*xi*psi(xi) / omega(xi), the quotient behind the gradient-product
    # bilinear estimate
    xi = np.asarray(xi, dtype=np.float64)
    num = np.sqrt(1.0 + xi**2) * xi**2 / _varphi(xi, c)
    om = np.abs(xi) / (1.0 + xi**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(xi == 0.0, 0.0, num / om)
    return r


_CLOSED_FORMS = {
    "xi_psi": lambda c: 1.0 / (c.gamma1 + 2.0 * math.sqrt(c.delta1)),
    "omega": lambda c: 0.5,
}


def sup_bound(expression: str, c: Bbm5Coefficients, refine_tol: float = 1e-10) -> float:
    """Supremum over xi of a named quotient expression.

    Closed forms are used where available (|xi*psi|, omega); everything else
    is a dense scan over [0, 1e3] with bracketed refinement.  All expressions
    decay rationally, so the scan window dominates the supremum.
    """
    if expression not in _EXPRESSIONS:
        raise ValueError(f"unknown expression {expression!r}")
    if not c.wellposed_regime:
        raise RegimeError("sup_bound requires gamma1, delta1 > 0")
    if expression in _CLOSED_FORMS:
        return _CLOSED_FORMS[expression](c)
    return scan_sup(expression, c, refine_tol=refine_tol)


def scan_sup(expression: str, c: Bbm5Coefficients, refine_tol: float = 1e-10) -> float:
    """Scan-based supremum (independent of any closed form)."""
    fn = _EXPRESSIONS[expression]
    xs = np.concatenate(
        [np.linspace(0.0, 20.0, 40001), np.logspace(np.log10(20.0), 3.0, 20000)]
    )
    vals = fn(xs, c)
    k = int(np.argmax(vals))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, len(xs) - 1)]
    if hi <= lo:
        return float(vals[k])
    res = minimize_scalar(
        lambda x: -fn(np.asarray([x]), c)[0],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": refine_tol},
    )
    return float(max(vals[k], -res.fun))


# ---------------------------------------------------------------------------
# Empirical operator-norm scans
# ---------------------------------------------------------------------------


def random_hs_field(grid: Grid, s: float, rng: np.random.Generator, amplitude=1.0) -> Field:
    """Random real field with spectral amplitudes (1+xi^2)^(-(s+1)/2) * N(0,1)."""
    xi = grid.wavenumbers
    mag = amplitude * (1.0 + xi**2) ** (-(s + 1.0) / 2.0)
    re = rng.standard_normal(grid.n)
    im = rng.standard_normal(grid.n)
    c = mag * (re + 1j * im)
    # hermitian symmetrization for realness
    n = grid.n
    sym = np.empty_like(c)
    sym[0] = c[0].real
    sym[1:] = 0.5 * (c[1:] + np.conj(c[1:][::-1]))
    sym[n // 2] = sym[n // 2].real
    return Field.from_spectral(grid, sym)


_ESTIMATES = {
    "tau_bilinear": {"arity": 2, "threshold": 0.0},
    "psi_trilinear": {"arity": 3, "threshold": 1.0 / 6.0},
    "psi_grad_bilinear": {"arity": 2, "threshold": 1.0},
}


@dataclass
class OperatorNormScan:
    estimate_id: str
    s: float
    trials: int
    max_ratio: float
    running_max: np.ndarray
    argmax_fields: tuple[Field, ...]

    @property
    def final_decile_growth(self) -> float:
        """Relative growth of the running maximum over the last 10% of trials."""
        k = max(1, int(0.9 * self.trials))
        before = self.running_max[k - 1]
        return float(self.running_max[-1] / before - 1.0) if before > 0 else 0.0


def estimate_ratio(estimate_id: str, fields: tuple[Field, ...], s: float,
                   c: Bbm5Coefficients) -> float:
    """Ratio LHS/RHS of the named multiplier estimate; 0 when RHS vanishes."""
    spec = _ESTIMATES[estimate_id]
    if len(fields) != spec["arity"]:
        raise ValueError(f"{estimate_id} takes {spec['arity']} fields")
    rhs = 1.0
    for f in fields:
        rhs *= sobolev_norm(f, s)
    if rhs == 0.0:
        return 0.0
    if estimate_id == "tau_bilinear":
        sym = Symbol("tau", c)
        prod = dealiased_product2(fields[0], fields[1])
    elif estimate_id == "psi_trilinear":
        sym = Symbol("psi", c)
        prod = dealiased_product3(fields[0], fields[1], fields[2])
    else:  # psi_grad_bilinear
        sym = Symbol("psi", c)
        prod = dealiased_product2(
            spectral_derivative(fields[0], 1), spectral_derivative(fields[1], 1)
        )
    lhs = sobolev_norm(apply_symbol_real(sym, prod), s)
    return lhs / rhs


def empirical_operator_norm(
    estimate_id: str,
    s: float,
    trials: int,
    grid: Grid,
    c: Bbm5Coefficients,
    seed: int = 0,
) -> OperatorNormScan:
    """Monte-Carlo scan of the operator-norm ratio of a multiplier estimate.

    Refuses Sobolev indices below the estimate's validity threshold.  Ratios
    are expected to plateau as trials accumulate (boundedness evidence, not a
    proof).
    """
    if estimate_id not in _ESTIMATES:
        raise ValueError(f"unknown estimate {estimate_id!r}")
    threshold = _ESTIMATES[estimate_id]["threshold"]
    if s < threshold:
        raise ValueError(
            f"{estimate_id} requires s >= {threshold}, got s = {s}"
        )
    if not c.wellposed_regime:
        raise RegimeError("operator-norm scan requires gamma1, delta1 > 0")
    arity = _ESTIMATES[estimate_id]["arity"]
    rng = np.random.default_rng(seed)
    running = np.empty(trials)
    best = 0.0
    best_fields: tuple[Field, ...] = ()
    for t in range(trials):
        fields = tuple(random_hs_field(grid, s, rng) for _ in range(arity))
        r = estimate_ratio(estimate_id, fields, s, c)
        if r > best:
            best = r
            best_fields = fields
        running[t] = best
    return OperatorNormScan(
        estimate_id=estimate_id,
        s=s,
        trials=trials,
        max_ratio=best,
        running_max=running,
        argmax_fields=best_fields,
    )
