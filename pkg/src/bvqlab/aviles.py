"""Mollified eikonal fields and singular-perturbation energy bounds.

For a Lipschitz psi with |grad psi| = 1 a.e. and a unit-mass mollifier eta,
the smoothed field psi_eps(x) = int eta(z) psi(x + eps z) dz has

    grad psi_eps(x)       =  int eta(z)      grad psi(x + eps z) dz
    eps * hess psi_eps(x) = -int grad eta(z) (x) grad psi(x + eps z) dz

and both are computed from these identities with the exact catalog gradient,
never by differencing psi_eps.  The energies measured here are

    I_p(eps) = int eps^(p-1) |hess psi_eps|^p
             + int (1/eps) (1 - |grad psi_eps|^2)^(p/(p-1))

together with the bound-side combination whose defect exponent is p/2.
Upper bounds multiply mollifier moments against kernel sweeps of the exact
gradient field; the cubic case additionally carries a pointwise Young-type
lower inequality with constant 3/cbrt(4) that holds sample by sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .errors import RegimeError
from .fields import JumpSpec, sample_gradient
from .grid import DomainMask, SampledField
from .jumps import dimensional_constant
from .kernels import (
    PairKernelConfig,
    bbm_sweep,
    bbm_value,
    resolve_radius,
    sweep_functional,
)
from .mollifier import Mollifier, energy_bound_coefficients
from .reports import ComparisonReport, equal_within, leq

YOUNG_CONSTANT = 3.0 / 4.0 ** (1.0 / 3.0)

# roundoff deadband: energies of exactly-eikonal smooth fields are 0 in exact
# arithmetic but accumulate ~1e-16-per-sample noise in the sums
ZERO_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class MollifiedField:
    """psi_eps with its convolution gradient and scaled hessian on an inner mask.

    Arrays are full-grid shaped; only entries under ``inner.inside`` are
    meaningful.  ``hess`` stores hess psi_eps (the identity above divided by
    eps).
    """

    inner: DomainMask
    eps: float
    eta: Mollifier
    psi: np.ndarray = field(repr=False)
    grad: np.ndarray = field(repr=False)
    hess: np.ndarray = field(repr=False)

    @property
    def grid(self):
        return self.inner.grid

    def gradient_norms(self) -> np.ndarray:
        g = self.grad[self.inner.inside]
        return np.sqrt(np.einsum("ik,ik->i", g, g))

    def hessian_frobenius(self) -> np.ndarray:
        hmat = self.hess[self.inner.inside]
        return np.sqrt(np.einsum("ijk,ijk->i", hmat, hmat))

    def eikonal_defect(self) -> np.ndarray:
        """1 - |grad psi_eps|^2, clamped at zero (it is nonnegative up to
        rounding because grad psi_eps is an eta-average of unit vectors)."""
        g = self.gradient_norms()
        return np.clip(1.0 - g * g, 0.0, None)


def mollify(
    psi: SampledField,
    eta: Mollifier,
    eps,
    inner: DomainMask | None = None,
    *,
    kappa: float = defaults.KAPPA,
) -> MollifiedField:
    """Smooth a catalog eikonal field at scale eps over an eroded inner mask.

    ``psi.source`` must be the generating analytic field (attached by
    ``sample_analytic``): the quadrature evaluates psi and its exact gradient
    off-lattice.  ``inner`` defaults to the mask eroded by eps and may be any
    mask eroded at least that much (fixed across a sweep, typically).
    """
    spec = psi.source
    if spec is None:
        raise ValueError("mollify needs the analytic source of the sampled field")
    h = psi.grid.spacing
    _, eps_len = resolve_radius(eps, h)
    if eps_len < kappa * h:
        raise RegimeError("mollification scale below kappa*h")
    if inner is None:
        inner = psi.mask.erode(eps_len)
    elif (inner.inside & ~(psi.mask.boundary_distance > eps_len)).any():
        raise ValueError("inner mask must keep distance > eps from the boundary")
    nodes, weights = eta.ball_rule()
    eta_w = weights * eta.value(nodes)
    eta_w = eta_w / eta_w.sum()  # discrete unit mass, exactly
    grad_w = weights[:, None] * eta.gradient(nodes)
    pts = inner.points_inside()
    n = psi.grid.dim
    npts = len(pts)
    psi_vals = np.zeros(npts)
    grad_vals = np.zeros((npts, n))
    hess_vals = np.zeros((npts, n, n))
    # accumulate in node chunks: one catalog evaluation per chunk
    chunk = max(1, int(4e6 // max(npts, 1)))
    for j0 in range(0, len(nodes), chunk):
        blk = nodes[j0 : j0 + chunk]
        shifted = (pts[None, :, :] + eps_len * blk[:, None, :]).reshape(-1, n)
        vals, gpsi = spec.evaluate_with_gradient(shifted)
        vals = vals.reshape(len(blk), npts)
        gpsi = gpsi.reshape(len(blk), npts, n)
        psi_vals += np.einsum("j,ji->i", eta_w[j0 : j0 + chunk], vals)
        grad_vals += np.einsum("j,jia->ia", eta_w[j0 : j0 + chunk], gpsi)
        hess_vals -= np.einsum("ja,jib->iab", grad_w[j0 : j0 + chunk], gpsi)
    hess_vals /= eps_len
    full_psi = np.zeros(psi.grid.extents)
    full_grad = np.zeros(psi.grid.extents + (n,))
    full_hess = np.zeros(psi.grid.extents + (n, n))
    full_psi[inner.inside] = psi_vals
    full_grad[inner.inside] = grad_vals
    full_hess[inner.inside] = hess_vals
    return MollifiedField(inner, eps_len, eta, full_psi, full_grad, full_hess)


def ag_energy(mf: MollifiedField, p: float) -> tuple[float, float]:
    """(hessian term, eikonal-defect term) of I_p(eps) for the smoothed field.

    Defect exponent p/(p-1); the sum of the pair is the energy itself.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    h = mf.grid.spacing
    cell = h**mf.grid.dim
    eps = mf.eps
    hn = mf.hessian_frobenius()
    defect = mf.eikonal_defect()
    t1 = eps ** (p - 1.0) * cell * math.fsum(hn**p)
    t2 = cell / eps * math.fsum(defect ** (p / (p - 1.0)))
    return t1, t2


def _energy_pair_lhs(mf: MollifiedField, q: float, p: float) -> float:
    """int eps^(q-1)|hess|^q + (1/eps)(1-|grad|^2)^(p/2) on the inner mask."""
    h = mf.grid.spacing
    cell = h**mf.grid.dim
    eps = mf.eps
    hn = mf.hessian_frobenius()
    defect = mf.eikonal_defect()
    return eps ** (q - 1.0) * cell * math.fsum(hn**q) + cell / eps * math.fsum(
        defect ** (p / 2.0)
    )


def _moment_bound(eta: Mollifier, q: float, p: float, a_q: float, a_p: float) -> float:
    """Moment-weighted combination that dominates the smoothed energies."""
    coef_q, coef_p = energy_bound_coefficients(eta, q, p)
    return coef_q * a_q + coef_p * a_p


def check_ag_upper_bound(
    psi: SampledField,
    eta: Mollifier,
    q: float,
    p: float,
    eps_list,
    slack: float = defaults.AG_SLACK,
    trend_slack: float = defaults.TREND_SLACK,
    *,
    kappa: float = defaults.KAPPA,
    fit_model: str = "linear-in-eps",
    config: PairKernelConfig | None = None,
) -> ComparisonReport:
    """Smoothed-energy upper bound against moment-weighted gradient sweeps.

    The limit inequality is checked at finite scale: the left side at the
    smallest eps must stay under the bound with 10% slack and must not
    increase along the sweep (within ``trend_slack``).  p = 2 is rejected:
    the defect-moment exponent degenerates there.
    """
    if not q > 1:
        raise ValueError("q must exceed 1")
    if not p > 2:
        raise ValueError(
            "p must exceed 2: the defect moment exponent p/(p-2) degenerates at p = 2"
        )
    spec = psi.source
    if spec is None:
        raise ValueError("needs the analytic source field")
    h = psi.grid.spacing
    eps_lens = [resolve_radius(e, h)[1] for e in eps_list]
    inner = psi.mask.erode(max(eps_lens))
    grad_field = sample_gradient(spec, psi.mask)
    lhs_vals = []
    for e in eps_list:
        mf = mollify(psi, eta, e, inner, kappa=kappa)
        lhs_vals.append(_energy_pair_lhs(mf, q, p))
    sweep_q = bbm_sweep(grad_field, q, eps_list, fit_model, inner, kappa=kappa, config=config)
    sweep_p = (
        sweep_q
        if p == q
        else bbm_sweep(grad_field, p, eps_list, fit_model, inner, kappa=kappa, config=config)
    )
    rhs = _moment_bound(eta, q, p, sweep_q.limit, sweep_p.limit)
    trend_ok = all(
        b <= a * (1.0 + trend_slack) + ZERO_ATOL for a, b in zip(lhs_vals, lhs_vals[1:])
    )
    rep = leq(
        lhs_vals[-1],
        rhs,
        f"smoothed-energy upper bound (q={q:g}, p={p:g})",
        slack=slack,
        atol=ZERO_ATOL,
        eps=eps_lens,
        lhs_values=lhs_vals,
        gradient_sweep_q=list(sweep_q.values),
        gradient_sweep_p=list(sweep_p.values),
        gradient_limit_q=sweep_q.limit,
        gradient_limit_p=sweep_p.limit,
        trend_ok=trend_ok,
    )
    if not trend_ok:
        rep = ComparisonReport(
            rep.lhs, rep.rhs, rep.relation, rep.tolerance, False, rep.provenance,
            rep.mid, rep.details,
        )
    return rep


def check_ag_chain(
    psi: SampledField,
    eta: Mollifier,
    eps_list,
    slack: float = defaults.AG_SLACK,
    *,
    kappa: float = defaults.KAPPA,
    fit_model: str = "linear-in-eps",
    config: PairKernelConfig | None = None,
) -> ComparisonReport:
    """Cubic energy chain: pointwise Young step, then the moment bound.

    At every sweep eps and every sample the inequality

        eps^2 H^3 + (1/eps) d^(3/2)  >=  (3 / cbrt 4) H d

    (H = |hess psi_eps|, d = |1 - |grad psi_eps|^2|) is verified exactly in
    extended precision.  The middle quantity I_3(eps) is then compared, with
    slack, against the moment bound at the matching scale (two smallest eps)
    and against the bound built from the extrapolated gradient sweep.  The
    q = p = 3 bound values are computed by the same code path as
    ``check_ag_upper_bound``, so the two instances agree bit for bit.
    """
    if psi.grid.dim not in (1, 2):
        raise ValueError("the cubic chain check runs in dimension 1 or 2")
    spec = psi.source
    if spec is None:
        raise ValueError("needs the analytic source field")
    h = psi.grid.spacing
    eps_lens = [resolve_radius(e, h)[1] for e in eps_list]
    inner = psi.mask.erode(max(eps_lens))
    grad_field = sample_gradient(spec, psi.mask)
    cell = h**psi.grid.dim

    young_lhs, mids, matched_bounds, young_ok = [], [], [], True
    kernel_cache: dict[float, float] = {}
    for e, e_len in zip(eps_list, eps_lens):
        mf = mollify(psi, eta, e, inner, kappa=kappa)
        hn = mf.hessian_frobenius()
        defect = mf.eikonal_defect()
        young_lhs.append(YOUNG_CONSTANT * cell * math.fsum(hn * defect))
        mids.append(
            e_len**2 * cell * math.fsum(hn**3)
            + cell / e_len * math.fsum(defect**1.5)
        )
        hl = hn.astype(np.longdouble)
        dl = defect.astype(np.longdouble)
        lhs_pt = e_len**2 * hl**3 + dl**1.5 / e_len
        rhs_pt = np.longdouble(YOUNG_CONSTANT) * hl * dl
        young_ok = young_ok and bool((lhs_pt >= rhs_pt).all())
        a3 = bbm_value(grad_field, 3.0, e, inner, kappa=kappa, config=config)
        kernel_cache[float(e_len)] = a3
        matched_bounds.append(_moment_bound(eta, 3.0, 3.0, a3, a3))
    sweep3 = sweep_functional(
        lambda e: kernel_cache[float(resolve_radius(e, h)[1])],
        eps_list,
        h,
        fit_model,
        kappa=kappa,
    )
    limit_bound = _moment_bound(eta, 3.0, 3.0, sweep3.limit, sweep3.limit)
    matched_ok = all(
        m <= b * (1.0 + slack) + ZERO_ATOL for m, b in list(zip(mids, matched_bounds))[-2:]
    )
    limit_ok = mids[-1] <= limit_bound * (1.0 + slack) + ZERO_ATOL
    passed = young_ok and matched_ok and limit_ok
    return ComparisonReport(
        lhs=young_lhs[-1],
        rhs=matched_bounds[-1],
        relation="between",
        tolerance=slack,
        passed=passed,
        provenance="cubic energy chain (Young step + moment bound)",
        mid=mids[-1],
        details={
            "eps": eps_lens,
            "young_lhs": young_lhs,
            "middle_energy": mids,
            "matched_bounds": matched_bounds,
            "limit_bound": limit_bound,
            "young_exact_ok": young_ok,
            "matched_ok": matched_ok,
            "limit_ok": limit_ok,
            "gradient_sweep": list(sweep3.values),
        },
    )


def gamma_limit_value(jump: JumpSpec | None) -> float:
    """(1/3) * sum over gradient-jump pieces of |g+ - g-|^3 * measure."""
    if jump is None or not jump.pieces:
        return 0.0
    return math.fsum(p.amplitude() ** 3 * p.measure for p in jump.pieces) / 3.0


def verify_gamma_consistency(
    psi: SampledField,
    eps_list,
    tolerance: float = defaults.TOLERANCE,
    *,
    kappa: float = defaults.KAPPA,
    fit_model: str = "linear-in-eps",
    config: PairKernelConfig | None = None,
) -> ComparisonReport:
    """Analytic ridge energy against the normalized cubic kernel sweep.

    lhs = (1/3) int over gradient jumps of |jump|^3; rhs = extrapolated
    kernel limit of the gradient field divided by 3 C_N.  The alternative
    normalization by 3 C_3 (the three-dimensional constant) is reported in
    the details for side-by-side comparison but not asserted.
    """
    spec = psi.source
    if spec is None:
        raise ValueError("needs the analytic source field")
    jump = spec.jump_spec(psi.grid)
    lhs = gamma_limit_value(jump)
    grad_field = sample_gradient(spec, psi.mask)
    sweep = bbm_sweep(grad_field, 3.0, eps_list, fit_model, kappa=kappa, config=config)
    cn = dimensional_constant(psi.grid.dim)
    rhs = sweep.limit / (3.0 * cn)
    return equal_within(
        lhs,
        rhs,
        tolerance,
        "ridge energy vs normalized cubic kernel limit",
        kernel_limit=sweep.limit,
        normalization_dim_constant=cn,
        alt_value_over_3_c3=sweep.limit / (3.0 * dimensional_constant(3)),
        sweep_values=list(sweep.values),
    )
