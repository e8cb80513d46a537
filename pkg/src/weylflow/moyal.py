"""Commutator symbols and their semiclassical expansion.

The bracket of two quantized symbols is itself a quantized symbol; this
module computes that exact bracket symbol on the grid (via the quantization
bijection) together with the expansion terms

    C_k(F, G) = (2i)^{-k} / k! * sum_m binom(k, m) (-1)^{k-m}
                [ (d_xi^m d_x^{k-m} F) (d_x^m d_xi^{k-m} G) - (F <-> G) ],

so C_1 = (1/i) (d_xi F d_x G - d_x F d_xi G) and every even-k term vanishes
identically (the antisymmetrization cancels pairwise).  All derivatives are
spectral.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .grids import SymbolField
from .spectral import field_derivative, norm_l1, norm_sup
from .weyl import OperatorMatrix, operator_norm, quantize_weyl, symbol_weyl

__all__ = [
    "poisson_bracket",
    "ck_term",
    "moyal_exact",
    "MoyalExpansion",
    "moyal_expand",
    "MoyalRemainderReport",
    "remainder_operator_norms",
]


def poisson_bracket(f: SymbolField, g: SymbolField) -> SymbolField:
    """{F, G} = d_xi F d_x G - d_x F d_xi G (sign fixed by C_1 = {F,G}/i)."""
    fx = field_derivative(f, 1, 0).values
    fxi = field_derivative(f, 0, 1).values
    gx = field_derivative(g, 1, 0).values
    gxi = field_derivative(g, 0, 1).values
    return f.with_values(fxi * gx - fx * gxi)


def _ck_half(f: SymbolField, g: SymbolField, k: int) -> np.ndarray:
    total = np.zeros(f.grid.shape, dtype=complex)
    for m in range(k + 1):
        df = field_derivative(f, k - m, m).values
        dg = field_derivative(g, m, k - m).values
        total += comb(k, m) * (-1) ** (k - m) * df * dg
    return total


def ck_term(f: SymbolField, g: SymbolField, k: int) -> SymbolField:
    """k-th expansion term C_k(F, G); returns the zero field for k = 0."""
    if k < 0:
        raise ValueError("expansion order must be nonnegative")
    if k == 0:
        return f.with_values(np.zeros(f.grid.shape, dtype=complex))
    vals = (_ck_half(f, g, k) - _ck_half(g, f, k)) / ((2j) ** k * factorial(k))
    return f.with_values(vals)


def moyal_exact(f: SymbolField, g: SymbolField, h: float) -> SymbolField:
    """Symbol of [Op(F), Op(G)], computed through the quantization bijection."""
    a = quantize_weyl(f, h)
    b = quantize_weyl(g, h)
    return symbol_weyl(a.commutator(b))


@dataclass(frozen=True)
class MoyalExpansion:
    """Exact bracket symbol, truncation sum_{k<N} h^k C_k, and remainder."""

    h: float
    order: int
    exact: SymbolField
    terms: tuple          # C_k fields for k = 1 .. N-1
    truncation: SymbolField
    remainder: SymbolField


def moyal_expand(f: SymbolField, g: SymbolField, h: float, order: int) -> MoyalExpansion:
    """Expand the bracket symbol to the given order (order >= 1).

    ``order`` plays the role of N in the truncation index: the truncation
    carries terms h^k C_k for k = 1 .. order-1 (empty for order 1) and the
    remainder is the exact symbol minus the truncation.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    exact = moyal_exact(f, g, h)
    terms = tuple(ck_term(f, g, k) for k in range(1, order))
    trunc = np.zeros(f.grid.shape, dtype=complex)
    for k, term in enumerate(terms, start=1):
        trunc = trunc + h ** k * term.values
    truncation = f.with_values(trunc)
    remainder = exact.with_values(exact.values - trunc)
    return MoyalExpansion(h, order, exact, terms, truncation, remainder)


@dataclass(frozen=True)
class MoyalRemainderReport:
    """Remainder norms next to their structural sup-norm budgets.

    The budgets sum h^{(j+k)/2} ||grad^j F||_sup ||grad^k G||_sup over the
    derivative-order window that controls the remainder at truncation order
    N in one dimension (j, k >= N with 2N <= j+k <= 2N+6 for the symbol
    sup norm and j+k <= 2N+10 for the operator norm).  The dimensionless
    ratios lhs/budget stay of moderate size on the Gaussian test family.
    """

    h: float
    order: int
    remainder_sup: float
    remainder_opnorm: float
    budget_sup: float
    budget_opnorm: float

    @property
    def sup_ratio(self) -> float:
        return self.remainder_sup / self.budget_sup

    @property
    def opnorm_ratio(self) -> float:
        return self.remainder_opnorm / self.budget_opnorm


def _grad_sup(field: SymbolField, total_order: int) -> float:
    best = 0.0
    for a in range(total_order + 1):
        b = total_order - a
        best = max(best, norm_sup(field_derivative(field, a, b)))
    return best


def remainder_operator_norms(f: SymbolField, g: SymbolField, h: float,
                             order: int) -> MoyalRemainderReport:
    """Compare the order-N remainder against its structural budgets."""
    exp = moyal_expand(f, g, h, order)
    rem_op = quantize_weyl(exp.remainder, h)
    n = order
    sup_f = {j: _grad_sup(f, j) for j in range(n, 2 * n + 11)}
    sup_g = {k: _grad_sup(g, k) for k in range(n, 2 * n + 11)}
    budget_sup = 0.0
    budget_op = 0.0
    for j in range(n, 2 * n + 11):
        for k in range(n, 2 * n + 11):
            tot = j + k
            if tot < 2 * n or tot > 2 * n + 10:
                continue
            contrib = h ** (0.5 * tot) * sup_f[j] * sup_g[k]
            budget_op += contrib
            if tot <= 2 * n + 6:
                budget_sup += contrib
    return MoyalRemainderReport(
        h=h,
        order=order,
        remainder_sup=norm_sup(exp.remainder),
        remainder_opnorm=operator_norm(rem_op),
        budget_sup=budget_sup,
        budget_opnorm=budget_op,
    )
