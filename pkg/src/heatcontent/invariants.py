"""Universal constants eps^0..eps^14 and the boundary invariants beta_0..beta_2.

The constants multiply the local boundary invariants in

    beta_0 = int eps0 psi1^0 psi2^0
    beta_1 = int eps1 psi1^1 psi2^0 + eps2 L_aa psi1^0 psi2^0 + eps3 psi1^0 psi2^1
    beta_2 = int eps4 psi1^2 psi2^0 + eps5 L_aa psi1^1 psi2^0 + eps6 E psi1^0 psi2^0
                 + eps7 psi1^0 psi2^2 + eps8 L_aa psi1^0 psi2^1 + eps9 Ric_mm psi1^0 psi2^0
                 + eps10 L_aa L_bb psi1^0 psi2^0 + eps11 L_ab L_ab psi1^0 psi2^0
                 + eps12 <psi1^0_:a, psi2^0_:a> + eps13 tau psi1^0 psi2^0
                 + eps14 psi1^1 psi2^1

where psi_i^k is the k-th inward normal derivative of the smooth factor of
the i-th weight.  Six of the constants follow from c by shifting the
exponents.  The rest are fixed by linear relations, which
:func:`solve_epsilon` solves independently of the closed-form table.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HeatContentError
from .special_fns import AlphaPair, c_coef

# eps index permutation under alpha1 <-> alpha2
SWAP_PERMUTATION = (0, 3, 2, 1, 7, 8, 6, 4, 5, 9, 10, 11, 12, 13, 14)

RESIDUAL_LIMIT = 1e-10


@dataclass(frozen=True)
class EpsilonTable:
    eps: tuple
    ap: AlphaPair = None

    def __getitem__(self, i):
        return self.eps[i]

    def __len__(self):
        return len(self.eps)

    def as_array(self):
        return np.array(self.eps, dtype=float)

    def to_dict(self):
        return {f"eps{i}": float(v) for i, v in enumerate(self.eps)}


@dataclass(frozen=True)
class BoundaryGeometry:
    """Boundary data, constant along the boundary."""

    area: float
    psi1_jet: tuple = (1.0, 0.0, 0.0)
    psi2_jet: tuple = (1.0, 0.0, 0.0)
    L_trace: float = 0.0
    L_trace_sq: float = 0.0
    L_sq: float = 0.0
    ric_mm: float = 0.0
    E_val: float = 0.0
    tau: float = 0.0
    grad_pairing: float = 0.0
    dim: int = None

    def __post_init__(self):
        vals = [self.area, *self.psi1_jet, *self.psi2_jet, self.L_trace, self.L_trace_sq,
                self.L_sq, self.ric_mm, self.E_val, self.tau, self.grad_pairing]
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("boundary geometry fields must be finite")
        if len(self.psi1_jet) != 3 or len(self.psi2_jet) != 3:
            raise DomainError("jets must have three entries (psi^0, psi^1, psi^2)")
        if not self.area > 0:
            raise DomainError("boundary area must be positive")
        if self.dim is not None and self.dim >= 3:
            slack = 1e-12 * max(1.0, abs(self.L_trace_sq))
            if self.L_sq < self.L_trace ** 2 / (self.dim - 1) - slack:
                raise DomainError("L_ab L_ab below (L_aa)^2/(m-1) violates Cauchy-Schwarz")
            if self.L_trace_sq < self.L_sq - slack:
                raise DomainError("L_aa L_bb < L_ab L_ab needs curvatures of mixed sign")


@dataclass(frozen=True)
class BetaTriple:
    beta0: float
    beta1: float
    beta2: float
    exponents: tuple = ()

    def to_dict(self):
        return {"beta0": self.beta0, "beta1": self.beta1, "beta2": self.beta2,
                "exponents": list(self.exponents)}


class RankError(HeatContentError):
    """The relation system is rank deficient."""


def _pair(ap):
    return ap if isinstance(ap, AlphaPair) else AlphaPair(*ap)


def _shifted_c(ap, c):
    """c at the six shifts (k1, k2) with k1 + k2 <= 2."""
    return {k: c(ap.shifted(*k)) for k in ((0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1))}


def epsilon_table(ap, c=c_coef):
    """The fifteen constants in closed form from c at shifted exponents."""
    ap = _pair(ap)
    cv = _shifted_c(ap, c)
    c00, c10, c01 = cv[0, 0], cv[1, 0], cv[0, 1]
    c20, c02, c11 = cv[2, 0], cv[0, 2], cv[1, 1]
    e = [0.0] * 15
    e[0] = c00
    e[1] = c10
    e[3] = c01
    e[2] = -(c10 + c01) / 2.0
    e[4] = c20
    e[7] = c02
    e[6] = c00
    e[14] = c11
    e[12] = -c00
    e[5] = -(c20 + c11) / 2.0
    e[8] = -(c11 + c02) / 2.0
    e[9] = e[11] = -c20 / 4.0 - c02 / 4.0 + c00 / 2.0
    e[10] = c20 / 8.0 + c02 / 8.0 + c11 / 4.0 - c00 / 4.0
    e[13] = 0.0
    return EpsilonTable(tuple(e), ap)


# Unknowns of the relation system; the rest are fixed by shifting c.
UNKNOWNS = (2, 5, 6, 8, 9, 10, 11, 12, 13)
KNOWN_SHIFTS = {0: (0, 0), 1: (1, 0), 3: (0, 1), 4: (2, 0), 7: (0, 2), 14: (1, 1)}


def _relations(cv):
    """Linear relations as (name, {eps index: coefficient}, constant term).

    Each relation reads sum_i coef_i eps_i + constant = 0.  The two
    first-order balances at shifted exponents involve eps^2 of the shifted
    pair, which equals eps5 (resp. eps8) of the original pair, while its
    eps^1 and eps^3 are c-values.
    """
    return [
        ("eps6 - eps0 = 0", {6: 1.0, 0: -1.0}, 0.0),
        ("eps13 = 0", {13: 1.0}, 0.0),
        ("eps12 + eps0 = 0", {12: 1.0, 0: 1.0}, 0.0),
        ("-eps1/2 - eps2 - eps3/2 = 0", {1: -0.5, 2: -1.0, 3: -0.5}, 0.0),
        ("-c(a1-2,a2)/2 - eps5 - c(a1-1,a2-1)/2 = 0", {5: -1.0},
         -0.5 * cv[2, 0] - 0.5 * cv[1, 1]),
        ("-c(a1-1,a2-1)/2 - eps8 - c(a1,a2-2)/2 = 0", {8: -1.0},
         -0.5 * cv[1, 1] - 0.5 * cv[0, 2]),
        ("-(eps6 + eps12)/4 = 0", {6: -0.25, 12: -0.25}, 0.0),
        ("-eps4/4 + eps6/2 - eps7/4 - eps9 = 0", {4: -0.25, 6: 0.5, 7: -0.25, 9: -1.0}, 0.0),
        ("eps4/8 + eps5/2 + eps6/4 + eps7/8 + eps8/2 + eps10 + eps14/4 = 0",
         {4: 0.125, 5: 0.5, 6: 0.25, 7: 0.125, 8: 0.5, 10: 1.0, 14: 0.25}, 0.0),
        ("-eps9 + eps11 = 0", {9: -1.0, 11: 1.0}, 0.0),
    ]


def relation_residuals(tab, c=c_coef):
    """Residual of every encoded relation (and each index shift) at ``tab``."""
    ap = tab.ap
    if ap is None:
        raise DomainError("table carries no AlphaPair")
    cv = _shifted_c(ap, c)
    out = {}
    for name, coefs, const in _relations(cv):
        out[name] = sum(v * tab[i] for i, v in coefs.items()) + const
    for i, k in KNOWN_SHIFTS.items():
        out[f"eps{i} - c(a1-{k[0]},a2-{k[1]}) = 0"] = tab[i] - cv[k]
    return out


@dataclass(frozen=True)
class ResidualReport:
    residuals: dict
    max_residual: float
    rank: int
    n_unknowns: int

    @property
    def ok(self):
        return self.rank == self.n_unknowns and self.max_residual <= RESIDUAL_LIMIT

    def as_text(self):
        lines = [f"{name:<72}{val: .3e}" for name, val in self.residuals.items()]
        lines.append(f"max |residual| = {self.max_residual:.3e}, rank {self.rank}/{self.n_unknowns}")
        return "\n".join(lines)


def solve_epsilon(ap, c=c_coef):
    """Re-derive the table by least squares from the linear relations.

    The knowns eps0, 1, 3, 4, 7, 14 come from c at shifted exponents; the
    nine unknowns solve the ten relations.  Raises :class:`RankError` if the
    system is rank deficient.
    """
    ap = _pair(ap)
    cv = _shifted_c(ap, c)
    known = {i: cv[k] for i, k in KNOWN_SHIFTS.items()}
    col = {u: j for j, u in enumerate(UNKNOWNS)}
    rels = _relations(cv)
    M = np.zeros((len(rels), len(UNKNOWNS)))
    rhs = np.zeros(len(rels))
    for r, (_, coefs, const) in enumerate(rels):
        total = const
        for i, v in coefs.items():
            if i in col:
                M[r, col[i]] += v
            else:
                total += v * known[i]
        rhs[r] = -total
    x, _, rank, _ = np.linalg.lstsq(M, rhs, rcond=None)
    if rank < len(UNKNOWNS):
        raise RankError(f"relation system has rank {rank} < {len(UNKNOWNS)}")
    eps = [0.0] * 15
    for i, v in known.items():
        eps[i] = float(v)
    for u, j in col.items():
        eps[u] = float(x[j])
    tab = EpsilonTable(tuple(eps), ap)
    res = relation_residuals(tab, c)
    report = ResidualReport(res, max(abs(v) for v in res.values()), int(rank), len(UNKNOWNS))
    return tab, report


def beta_boundary(geom, tab):
    """beta_0, beta_1, beta_2 for boundary-constant data."""
    e = tab
    p1, p2 = geom.psi1_jet, geom.psi2_jet
    L = geom.L_trace
    b0 = e[0] * p1[0] * p2[0]
    b1 = e[1] * p1[1] * p2[0] + e[2] * L * p1[0] * p2[0] + e[3] * p1[0] * p2[1]
    b2 = (e[4] * p1[2] * p2[0]
          + e[5] * L * p1[1] * p2[0]
          + e[6] * geom.E_val * p1[0] * p2[0]
          + e[7] * p1[0] * p2[2]
          + e[8] * L * p1[0] * p2[1]
          + e[9] * geom.ric_mm * p1[0] * p2[0]
          + e[10] * geom.L_trace_sq * p1[0] * p2[0]
          + e[11] * geom.L_sq * p1[0] * p2[0]
          + e[12] * geom.grad_pairing
          + e[13] * geom.tau * p1[0] * p2[0]
          + e[14] * p1[1] * p2[1])
    exps = ()
    if tab.ap is not None:
        s = tab.ap.s
        exps = ((1.0 - s) / 2.0, (2.0 - s) / 2.0, (3.0 - s) / 2.0)
    A = geom.area
    return BetaTriple(A * b0, A * b1, A * b2, exps)


def ball_geometry(a):
    """Sphere of radius a in R^3 with the exact data delta**-alpha."""
    if not a > 0:
        raise DomainError("radius must be positive")
    return BoundaryGeometry(area=4.0 * math.pi * a * a, L_trace=2.0 / a,
                            L_trace_sq=4.0 / (a * a), L_sq=2.0 / (a * a), dim=3)


def interval_geometry():
    """Two boundary points of an interval: flat, total boundary measure 2."""
    return BoundaryGeometry(area=2.0)
