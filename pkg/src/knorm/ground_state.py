"""Radial ground state of the scalar field equation and its certificates.

Solves, for N in {1,2,3} and admissible p,

    Q'' + (N-1)/r Q' - kappa Q + sigma Q^{p+1} = 0,   Q'(0) = 0,  Q > 0,  Q -> 0,

with kappa = (4 + 2p - Np)/(Np) and sigma = 4/(Np), by bisection on the
shooting parameter q0 = Q(0): trajectories that cross zero overshoot,
trajectories whose slope turns positive while Q > 0 undershoot.

The integrated trajectory is trusted only while the shooting error is far
below Q itself; once Q drops to TAIL_SWITCH * q0 the profile is continued
with the exact decaying solution of the linearized equation (exp for N=1,
Bessel K0 for N=2, exp/r for N=3). The neglected nonlinear term is of
relative size (Q/q0)^p there.

Norms use composite Simpson with the surface weight plus an exponential
estimate for the truncated tail (below 1e-15 of the total by construction).
The solved profile is certified by the identity

    grad_sq = mass_sq = 2/(p+2) * pnorm

and by the sharp interpolation-inequality ratio, which equals 1 exactly on
scalings of Q and is < 1 for any other field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import k0e, k1e

from . import radial
from .errors import InadmissibleParameters, InvalidField, NonConvergence, ShootingError

TAIL_SWITCH = 1e-4      # graft the analytic tail once Q <= TAIL_SWITCH * q0
SINGULAR_R0 = 1e-6      # Taylor-seed start radius for N >= 2


def critical_exponent_gap(N: int) -> float:
    """Upper bound 2* - 2 for the admissible exponent p."""
    return 4.0 if N == 3 else math.inf


@dataclass(frozen=True)
class FieldEqCoeffs:
    """Coefficients of the normalized field equation for given (N, p)."""

    N: int
    p: float
    kappa: float
    sigma: float

    @classmethod
    def for_problem(cls, N: int, p: float) -> "FieldEqCoeffs":
        if N not in (1, 2, 3):
            raise InadmissibleParameters(f"dimension N must be 1, 2 or 3, got {N}")
        if not (0.0 < p < critical_exponent_gap(N)):
            raise InadmissibleParameters(
                f"exponent p={p} outside (0, {critical_exponent_gap(N)}) for N={N}")
        kappa = (4.0 + 2.0 * p - N * p) / (N * p)
        if kappa <= 0.0:
            raise InadmissibleParameters(f"linear coefficient not positive for N={N}, p={p}")
        return cls(N=N, p=float(p), kappa=kappa, sigma=4.0 / (N * p))


@dataclass(frozen=True)
class SolverConfig:
    """Shooting/quadrature settings; defaults reproduce all reference values."""

    n_steps: int = 8192            # RK4 steps over [0, r_max]
    r_max_mult: float = 40.0       # r_max = r_max_mult / sqrt(kappa)
    bracket_lo: float = 0.1
    bracket_hi: float = 50.0
    q0_tol: float = 1e-12          # bisection width on q0
    tail_switch: float = TAIL_SWITCH
    refine: bool = True            # double steps until norms move < richardson_tol
    max_refine: int = 3
    richardson_tol: float = 1e-8
    ode_residual_tol: float = 1e-6

    def digest(self) -> str:
        import hashlib
        key = repr((self.n_steps, self.r_max_mult, self.bracket_lo, self.bracket_hi,
                    self.q0_tol, self.tail_switch, self.refine, self.max_refine,
                    self.richardson_tol))
        return hashlib.sha256(key.encode()).hexdigest()[:12]


@dataclass(frozen=True, eq=False)
class GroundStateProfile:
    """Radial samples of the positive decaying solution on a uniform grid."""

    coeffs: FieldEqCoeffs
    r_grid: np.ndarray
    values: np.ndarray
    q0: float
    r_max: float
    dvalues: np.ndarray = field(repr=False)
    switch_index: int = 0          # first index carried by the analytic tail

    def __post_init__(self):
        v = self.values
        if v[0] != self.q0 or self.q0 <= 0.0:
            raise InvalidField("profile must start at its shooting value q0 > 0")
        if not np.all(np.isfinite(v)):
            raise InvalidField("profile has non-finite samples")
        if np.any(np.diff(v) >= 0.0):
            raise InvalidField("profile must be strictly decreasing")
        if v[-1] >= 1e-8 * self.q0:
            raise InvalidField("profile truncated before decaying to 1e-8 * q0")

    @property
    def h(self) -> float:
        return float(self.r_grid[1] - self.r_grid[0])


@dataclass(frozen=True)
class QNorms:
    """The three integral norms of Q; q_l2 = sqrt(mass_sq)."""

    mass_sq: float     # integral of Q^2
    grad_sq: float     # integral of |grad Q|^2
    pnorm: float       # integral of Q^{p+2}
    q_l2: float

    def __post_init__(self):
        if min(self.mass_sq, self.grad_sq, self.pnorm) <= 0.0:
            raise InvalidField("norms of a ground state must be positive")


@dataclass(frozen=True)
class PohozaevReport:
    residual_mass: float    # relative residual of grad_sq - mass_sq
    residual_pnorm: float   # relative residual of grad_sq - 2 pnorm/(p+2)
    tol: float
    passed: bool


@dataclass(frozen=True)
class GNCertificate:
    """Sharp interpolation-inequality data: the constant and an achieved ratio."""

    constant: float
    ratio: float


# ----------------------------------------------------------------------------
# shooting integrator

OVERSHOOT, UNDERSHOOT, NO_EVENT = 1, -1, 0


def _shoot(coeffs: FieldEqCoeffs, q0: float, h: float, n_steps: int,
           record: np.ndarray | None = None,
           drecord: np.ndarray | None = None) -> tuple[int, int]:
    """Fixed-step RK4 from the regular seed; returns (event, step index).

    record/drecord, when given, receive Q and Q' at every grid node that was
    actually integrated (garbage beyond the event index).

    Genuine trajectories obey the damped-particle energy bound: with
    V(q) = -kappa q^2/2 + sigma q^{p+2}/(p+2), the quantity v^2/2 + V(q) never
    increases, so q stays below max(q0, Q_z) (Q_z the right zero of V) and
    v^2 stays below 2(V(q0) - min V). A state outside those caps can only be
    an under-resolved plunge through zero, which is an overshoot.
    """
    kappa, sigma, p, N = coeffs.kappa, coeffs.sigma, coeffs.p, coeffs.N
    pe = p + 1.0
    nm1 = N - 1

    def potential(x: float) -> float:
        return -0.5 * kappa * x * x + sigma * abs(x) ** (p + 2.0) / (p + 2.0)

    q_zero = (kappa * (p + 2.0) / (2.0 * sigma)) ** (1.0 / p)
    q_rest = (kappa / sigma) ** (1.0 / p)
    q_cap = 1.000001 * max(q0, q_zero)
    vsq_cap = 2.000002 * (potential(q0) - potential(q_rest)) + 1e-300
    if N == 1:
        r, q, v = 0.0, q0, 0.0
        start = 1
    else:
        # Taylor seed just off the axis removes the (N-1)/r singularity
        r0 = SINGULAR_R0
        alpha = (kappa * q0 - sigma * q0 ** pe) / (2.0 * N)
        r, q, v = r0, q0 + alpha * r0 * r0, 2.0 * alpha * r0
        start = 1
    if record is not None:
        record[0] = q0
        drecord[0] = 0.0

    def force(x: float) -> float:
        return kappa * x - sigma * math.copysign(abs(x) ** pe, x)

    for i in range(start, n_steps + 1):
        target = i * h
        step = target - r
        if nm1:
            rh = r + 0.5 * step
            k1q = v
            k1v = force(q) - nm1 * v / r
            y = v + 0.5 * step * k1v
            k2q = y
            k2v = force(q + 0.5 * step * k1q) - nm1 * y / rh
            y = v + 0.5 * step * k2v
            k3q = y
            k3v = force(q + 0.5 * step * k2q) - nm1 * y / rh
            y = v + step * k3v
            k4q = y
            k4v = force(q + step * k3q) - nm1 * y / target
        else:
            k1q = v
            k1v = force(q)
            k2q = v + 0.5 * step * k1v
            k2v = force(q + 0.5 * step * k1q)
            k3q = v + 0.5 * step * k2v
            k3v = force(q + 0.5 * step * k2q)
            k4q = v + step * k3v
            k4v = force(q + step * k3q)
        q += step / 6.0 * (k1q + 2.0 * (k2q + k3q) + k4q)
        v += step / 6.0 * (k1v + 2.0 * (k2v + k3v) + k4v)
        r = target
        if record is not None:
            record[i] = q
            drecord[i] = v
        if not (math.isfinite(q) and math.isfinite(v)):
            return OVERSHOOT, i          # blow-up follows a zero crossing
        if q <= 0.0:
            return OVERSHOOT, i
        if q > q_cap or v * v > vsq_cap:
            return OVERSHOOT, i          # energy bound broken: unresolved plunge
        if v > 0.0:
            return UNDERSHOOT, i
    return NO_EVENT, n_steps


def classify_shot(N: int, p: float, q0: float, cfg: SolverConfig | None = None) -> str:
    """Diagnostic: classify one shooting trajectory as overshoot/undershoot."""
    cfg = cfg or SolverConfig()
    coeffs = FieldEqCoeffs.for_problem(N, p)
    h = cfg.r_max_mult / math.sqrt(coeffs.kappa) / cfg.n_steps
    event, _ = _shoot(coeffs, q0, h, cfg.n_steps)
    return {OVERSHOOT: "overshoot", UNDERSHOOT: "undershoot", NO_EVENT: "no_event"}[event]


def _bisect_q0(coeffs: FieldEqCoeffs, cfg: SolverConfig, h: float) -> float:
    lo, hi = cfg.bracket_lo, cfg.bracket_hi
    ev_lo, _ = _shoot(coeffs, lo, h, cfg.n_steps)
    ev_hi, _ = _shoot(coeffs, hi, h, cfg.n_steps)
    if not (ev_lo in (UNDERSHOOT, NO_EVENT) and ev_hi == OVERSHOOT):
        raise ShootingError(
            f"bracket [{lo}, {hi}] does not straddle the ground state for "
            f"N={coeffs.N}, p={coeffs.p} (got {ev_lo}/{ev_hi})")
    while hi - lo > cfg.q0_tol:
        mid = 0.5 * (lo + hi)
        ev, _ = _shoot(coeffs, mid, h, cfg.n_steps)
        if ev == OVERSHOOT:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _graft_tail(coeffs: FieldEqCoeffs, r: np.ndarray, q: np.ndarray, v: np.ndarray,
                i_sw: int) -> None:
    """Continue (q, v) beyond index i_sw with the decaying linearized solution."""
    kappa, N = coeffs.kappa, coeffs.N
    rk = math.sqrt(kappa)
    r0, q0 = r[i_sw], q[i_sw]
    rt = r[i_sw:]
    if N == 1:
        tail = q0 * np.exp(-rk * (rt - r0))
        dtail = -rk * tail
    elif N == 3:
        tail = q0 * (r0 / rt) * np.exp(-rk * (rt - r0))
        dtail = -(rk + 1.0 / rt) * tail
    else:
        x, x0 = rk * rt, rk * r0
        scale = q0 / k0e(x0)
        damp = np.exp(-(x - x0))
        tail = scale * k0e(x) * damp
        dtail = -rk * scale * k1e(x) * damp
    q[i_sw:] = tail
    v[i_sw:] = dtail


def _solve_at(coeffs: FieldEqCoeffs, cfg: SolverConfig, n_steps: int) -> GroundStateProfile:
    r_max = cfg.r_max_mult / math.sqrt(coeffs.kappa)
    h = r_max / n_steps
    sub = replace(cfg, n_steps=n_steps)
    q0 = _bisect_q0(coeffs, sub, h)
    r = radial.uniform_grid(r_max, n_steps)
    q = np.empty(n_steps + 1)
    v = np.empty(n_steps + 1)
    event, i_stop = _shoot(coeffs, q0, h, n_steps, record=q, drecord=v)
    level = cfg.tail_switch * q0
    below = np.nonzero(q[:i_stop + 1] <= level)[0]
    if len(below) == 0:
        raise NonConvergence(
            "shooting trajectory never decayed to the tail-switch level; "
            "tighten q0_tol or widen the bracket")
    i_sw = int(below[0])
    _graft_tail(coeffs, r, q, v, i_sw)
    return GroundStateProfile(coeffs=coeffs, r_grid=r, values=q, dvalues=v,
                              q0=q0, r_max=r_max, switch_index=i_sw)


def solve_ground_state(N: int, p: float, cfg: SolverConfig | None = None) -> GroundStateProfile:
    """Shooting solution of the field equation; step refined until norms settle.

    Raises ShootingError when the bracket fails and NonConvergence when the
    Richardson step-doubling check cannot reach richardson_tol.
    """
    cfg = cfg or SolverConfig()
    coeffs = FieldEqCoeffs.for_problem(N, p)
    prof = _solve_at(coeffs, cfg, cfg.n_steps)
    if not cfg.refine:
        return prof
    norms = compute_norms(prof)
    n = cfg.n_steps
    for _ in range(cfg.max_refine):
        fine = _solve_at(coeffs, cfg, 2 * n)
        fnorms = compute_norms(fine)
        delta = max(
            abs(fnorms.mass_sq - norms.mass_sq) / fnorms.mass_sq,
            abs(fnorms.grad_sq - norms.grad_sq) / fnorms.grad_sq,
            abs(fnorms.pnorm - norms.pnorm) / fnorms.pnorm,
        )
        if delta < cfg.richardson_tol:
            return fine
        prof, norms, n = fine, fnorms, 2 * n
    raise NonConvergence(
        f"norms still moving more than {cfg.richardson_tol} after {cfg.max_refine} refinements")


def closed_form_1d(p: float, r_grid: np.ndarray | None = None,
                   cfg: SolverConfig | None = None) -> GroundStateProfile:
    """Analytic N=1 profile  (kappa(p+2)/(2 sigma))^{1/p} sech^{2/p}((p/2) sqrt(kappa) r).

    Serves as the independent oracle for the shooting solver in one dimension.
    """
    cfg = cfg or SolverConfig()
    coeffs = FieldEqCoeffs.for_problem(1, p)
    if r_grid is None:
        r_max = cfg.r_max_mult / math.sqrt(coeffs.kappa)
        r_grid = radial.uniform_grid(r_max, 2 * cfg.n_steps if cfg.refine else cfg.n_steps)
    amp = (coeffs.kappa * (p + 2.0) / (2.0 * coeffs.sigma)) ** (1.0 / p)
    k = 0.5 * p * math.sqrt(coeffs.kappa)
    m = 2.0 / p
    sech = 1.0 / np.cosh(k * r_grid)
    q = amp * sech ** m
    v = -m * k * np.tanh(k * r_grid) * q
    return GroundStateProfile(coeffs=coeffs, r_grid=r_grid, values=q, dvalues=v,
                              q0=float(q[0]), r_max=float(r_grid[-1]),
                              switch_index=len(r_grid))


# ----------------------------------------------------------------------------
# norms and certificates

def compute_norms(profile: GroundStateProfile, tail_tol: float = 1e-9) -> QNorms:
    """Radial Simpson quadrature of Q^2, |Q'|^2, Q^{p+2} with tail estimates."""
    r, q, v = profile.r_grid, profile.values, profile.dvalues
    N, p = profile.coeffs.N, profile.coeffs.p
    h = profile.h
    w = radial.quadrature_weights(r, N)
    integrands = (q * q, v * v, q ** (p + 2.0))
    vals = []
    for g in integrands:
        main = float(w @ g)
        # surface weight cancels against the decay of g in leading order,
        # so a plain exponential estimate of the truncated tail is enough
        tail = radial.tail_correction(g * radial.SURFACE_WEIGHT[N] * r ** (N - 1), h)
        if tail > tail_tol * main:
            raise NonConvergence("quadrature tail estimate exceeds tolerance; "
                                 "truncation radius too small")
        vals.append(main + tail)
    mass_sq, grad_sq, pnorm = vals
    return QNorms(mass_sq=mass_sq, grad_sq=grad_sq, pnorm=pnorm, q_l2=math.sqrt(mass_sq))


def check_pohozaev(norms: QNorms, p: float, tol: float = 1e-6) -> PohozaevReport:
    """Certificate grad_sq = mass_sq = 2 pnorm/(p+2) with relative residuals."""
    a, b, c = norms.grad_sq, norms.mass_sq, norms.pnorm
    res_mass = abs(a - b) / max(a, b)
    res_pnorm = abs(a - 2.0 * c / (p + 2.0)) / max(a, 2.0 * c / (p + 2.0))
    return PohozaevReport(residual_mass=res_mass, residual_pnorm=res_pnorm,
                          tol=tol, passed=(res_mass < tol and res_pnorm < tol))


def gn_constant(norms: QNorms, p: float, N: int | None = None) -> float:
    """Sharp interpolation constant (p+2) / (2 |Q|_{L2}^p)."""
    return (p + 2.0) / (2.0 * norms.q_l2 ** p)


def check_gn(fieldlike, constant: float, p: float, N: int) -> GNCertificate:
    """Achieved interpolation ratio of a radial field; <= 1, with equality on Q-scalings.

    ratio = pnorm / (constant * grad_sq^{Np/4} * mass^{(2(p+2)-Np)/4}).
    """
    from . import fields as _fields
    m = _fields.mass(fieldlike)
    if m <= 0.0:
        raise InvalidField("zero field rejected by the interpolation-ratio check")
    a = _fields.grad_norm_sq(fieldlike)
    pn = _fields.pnorm(fieldlike, p)
    denom = constant * a ** (N * p / 4.0) * m ** ((2.0 * (p + 2.0) - N * p) / 4.0)
    return GNCertificate(constant=constant, ratio=pn / denom)


# ----------------------------------------------------------------------------
# solver certificates

def ode_residual(profile: GroundStateProfile) -> float:
    """Relative L2 residual of the field equation on the integrated region.

    The window around the tail graft (where the profile is C^0 but only
    approximately C^1) and the one-sided boundary stencils are excluded; the
    grafted tail solves the linearized equation exactly and is covered by the
    decay-rate certificate instead.
    """
    c = profile.coeffs
    r, q = profile.r_grid, profile.values
    lap = radial.laplacian_radial(q, r, c.N)
    res = lap - c.kappa * q + c.sigma * q ** (c.p + 1.0)
    w = radial.quadrature_weights(r, c.N)
    keep = np.ones(len(r), dtype=bool)
    keep[:2] = False
    keep[-4:] = False
    i_sw = profile.switch_index
    keep[max(0, i_sw - 3):min(len(r), i_sw + 4)] = False
    num = float(w[keep] @ res[keep] ** 2)
    den = float(w[keep] @ (c.kappa * q[keep]) ** 2)
    return math.sqrt(num / den)


def tail_log_slope(profile: GroundStateProfile, lo_frac: float = 0.5,
                   hi_frac: float = 0.75) -> float:
    """Average d(log Q)/dr over [lo_frac, hi_frac] * r_max (expected -sqrt(kappa))."""
    n = len(profile.r_grid) - 1
    i0, i1 = int(lo_frac * n), int(hi_frac * n)
    q0, q1 = profile.values[i0], profile.values[i1]
    return float(math.log(q1 / q0) / (profile.r_grid[i1] - profile.r_grid[i0]))


# ----------------------------------------------------------------------------
# exports

def profile_csv(profile: GroundStateProfile) -> str:
    """CSV body with header r,Q in full double precision."""
    lines = ["r,Q"]
    lines += [f"{r:.17g},{q:.17g}" for r, q in zip(profile.r_grid, profile.values)]
    return "\n".join(lines) + "\n"


def norms_json(profile: GroundStateProfile, norms: QNorms,
               report: PohozaevReport) -> dict:
    return {
        "N": profile.coeffs.N,
        "p": profile.coeffs.p,
        "mass_sq": norms.mass_sq,
        "grad_sq": norms.grad_sq,
        "pnorm": norms.pnorm,
        "q_l2": norms.q_l2,
        "pohozaev_residuals": [report.residual_mass, report.residual_pnorm],
    }
