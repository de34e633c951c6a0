"""Piecewise-linear 1D element matrices with exact weighted integrals.

Every assembled operator in this package is a Kronecker combination of
weighted 1D factor matrices on a node sequence:

  mass_matrix(nodes, w)        M[w]_ij = int w(x) phi_i phi_j dx
  stiffness_matrix(nodes, w)   K[w]_ij = int w(x) phi_i' phi_j' dx
  convection_matrix(nodes, w)  C[w]_ij = int w(x) phi_i' phi_j dx

with hat functions phi_i.  Weights are monomials x^k (k = 0..3, integrated
exactly by 3-point Gauss) or the singular reciprocals 1/x and 1/x^2
(closed forms with logarithms).  Exactness keeps the discretizations
conforming, which the ordering and bracket checks downstream rely on.

For a cell starting at x = 0 a reciprocal weight is only integrable against
basis functions vanishing at 0; entries touching the x = 0 node are then
written as 0.0 and the caller must drop that node from the active set
(asserted via ``zero_singular_node``).
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

__all__ = ["mass_matrix", "stiffness_matrix", "convection_matrix", "node_indicator"]

# 5-point Gauss-Legendre on [-1, 1]: exact for polynomials of degree <= 9,
# which covers basis products (degree 2) against monomial weights up to x^6.
_GX, _GW = np.polynomial.legendre.leggauss(5)


def _check_weight(power: int):
    if power not in (-2, -1, 0, 1, 2, 3, 4, 5, 6):
        raise ValueError(f"unsupported weight exponent {power}")


def _poly_moments(a: float, b: float, power: int):
    """(int w, int w phiL, int w phiR, int w phiL^2, int w phiL phiR, int w phiR^2)."""
    h = b - a
    x = 0.5 * (a + b) + 0.5 * h * _GX
    wq = 0.5 * h * _GW
    w = x**power
    L = (b - x) / h
    R = (x - a) / h
    return (np.dot(wq, w), np.dot(wq, w * L), np.dot(wq, w * R),
            np.dot(wq, w * L * L), np.dot(wq, w * L * R), np.dot(wq, w * R * R))


def _recip_moments(a: float, b: float, power: int):
    """Closed-form moments for w = 1/x (power=-1) or 1/x^2 (power=-2), a > 0."""
    h = b - a
    ell = np.log(b / a)
    if power == -1:
        w0 = ell
        iL = (b * ell - h) / h
        iR = (h - a * ell) / h
        iLL = (b * b * ell - 2.0 * b * h + 0.5 * (b * b - a * a)) / h**2
        iLR = (-a * b * ell + (a + b) * h - 0.5 * (b * b - a * a)) / h**2
        iRR = (0.5 * (b * b - a * a) - 2.0 * a * h + a * a * ell) / h**2
    else:
        w0 = h / (a * b)
        iL = 1.0 / a - ell / h
        iR = ell / h - 1.0 / b
        iLL = (b * h / a - 2.0 * b * ell + h) / h**2
        iLR = ((a + b) * ell - 2.0 * h) / h**2
        iRR = (h - 2.0 * a * ell + a * h / b) / h**2
    return w0, iL, iR, iLL, iLR, iRR


def _singular_first_cell_moments(b: float, power: int):
    """Cell [0, b]: only the right-hat moments exist; left entries are zeroed."""
    if power == -1:
        # int (x/b)^2 / x = 1/2,  int (x/b) / x = 1
        return np.inf, 0.0, 1.0, 0.0, 0.0, 0.5
    # power == -2: int (x/b)^2 / x^2 = b -> /b^2 handled below via exact value 1/b
    return np.inf, 0.0, np.inf, 0.0, 0.0, 1.0 / b


def _cell_moments(a: float, b: float, power: int):
    if power >= 0:
        return _poly_moments(a, b, power)
    if a > 0.0:
        return _recip_moments(a, b, power)
    if a == 0.0:
        return _singular_first_cell_moments(b, power)
    raise ValueError("reciprocal weights need nonnegative cells")


def _assemble(nodes, power: int, kind: str, zero_singular_node: bool):
    _check_weight(power)
    nodes = np.asarray(nodes, dtype=float)
    nn = nodes.size
    if power < 0 and nodes[0] == 0.0 and not zero_singular_node:
        raise ValueError("singular weight with an active node at 0")
    rows, cols, vals = [], [], []
    for c in range(nn - 1):
        a, b = nodes[c], nodes[c + 1]
        h = b - a
        w0, iL, iR, iLL, iLR, iRR = _cell_moments(a, b, power)
        if kind == "mass":
            local = np.array([[iLL, iLR], [iLR, iRR]])
        elif kind == "stiff":
            if not np.isfinite(w0):
                raise ValueError("stiffness with a reciprocal weight on a cell at 0")
            local = (w0 / h**2) * np.array([[1.0, -1.0], [-1.0, 1.0]])
        else:  # convection: C_ij = sign_i/h * int w phi_j
            if not np.isfinite(w0):
                raise ValueError("convection with a reciprocal weight on a cell at 0")
            local = np.array([[-iL, -iR], [iL, iR]]) / h
        if power < 0 and a == 0.0:
            local = local.copy()
            local[0, :] = 0.0
            local[:, 0] = 0.0
        for i in range(2):
            for j in range(2):
                rows.append(c + i)
                cols.append(c + j)
                vals.append(local[i, j])
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(nn, nn)).tocsr()
    mat.sum_duplicates()
    return mat


def mass_matrix(nodes, power: int = 0, zero_singular_node: bool = False) -> sp.csr_matrix:
    return _assemble(nodes, power, "mass", zero_singular_node)


def stiffness_matrix(nodes, power: int = 0, zero_singular_node: bool = False) -> sp.csr_matrix:
    return _assemble(nodes, power, "stiff", zero_singular_node)


def convection_matrix(nodes, power: int = 0, zero_singular_node: bool = False) -> sp.csr_matrix:
    return _assemble(nodes, power, "conv", zero_singular_node)


def node_indicator(nn: int, index: int, value: float = 1.0) -> sp.csr_matrix:
    """Rank-one diagonal e_i e_i^T * value (point mass at one node)."""
    d = np.zeros(nn)
    d[index] = value
    return sp.diags(d).tocsr()
