"""Hardy Z-function, the Riemann-Siegel phase, and the ladder weight omega.

Everything here is a pure function of (t, config) in double precision:

* ``theta``   -- the phase theta(t) via its Stirling expansion (variant
  ``exact_asymptotic``) or the bare main term theta1(t) = (t/2)ln(t/2pi)
  - t/2 - pi/8 (variant ``main_term``).
* ``hardy_z`` -- Z(t) = e^{i theta(t)} zeta(1/2 + it), real on the real
  line, through two independent routes: the Riemann-Siegel main sum with
  0..4 correction terms (fast path), and an Euler-Maclaurin evaluation of
  zeta(1/2+it) rotated by a log-Gamma phase (oracle path, cost grows with
  t, capped at t <= 1e5).
* ``omega``   -- the ~1/ln t weight that makes omega * Z^2 have local mean
  1 - (1-gamma)/ln t, i.e. the derivative of the ladder map.

The evaluators accept scalars or numpy arrays and never mutate shared
state, so they are safe to call from any number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .errors import AccuracyError
from .rscoef import MAX_CORRECTION_TERMS, correction_sum

TWO_PI = 2.0 * math.pi
# Euler's constant; the single source for every (1 - gamma) factor.
EULER_GAMMA = 0.57721566490153286

THETA_MIN_T = 10.0
OMEGA_MIN_T = 100.0
EM_MAX_T = 1.0e5

# 2*pi as a double-double, lifted to 80-bit: hi is the nearest double,
# lo the exact residue 2*pi - hi.
_TWO_PI_LD = np.longdouble(6.283185307179586) + np.longdouble(2.4492935982947064e-16)
_LOG_2PI_LD = np.log(_TWO_PI_LD)
_PI_8_LD = _TWO_PI_LD / np.longdouble(16)

# Cody-Waite split of 2*pi into <=22-bit pieces so that m*Ci is exact for
# multipliers m up to 2^31; used when t*ln n grows past the point where a
# plain double phase would lose more than ~5e-8 absolute.
_CW1 = math.floor(TWO_PI * 2 ** 19) / 2 ** 19
_CW2 = math.floor((TWO_PI - _CW1) * 2 ** 40) / 2 ** 40
_CW3 = float(_TWO_PI_LD - np.longdouble(_CW1) - np.longdouble(_CW2))
_PLAIN_PHASE_LIMIT = 4.0e8

# Bernoulli numbers B_2..B_24 for the Euler-Maclaurin tail.
_B2K = [
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
    7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330,
    854513.0 / 138, -236364091.0 / 2730,
]

_EVAL_CHUNK = 2048


@dataclass(frozen=True)
class ZEvalConfig:
    """Evaluation policy for ``hardy_z``.

    correction_order: number of Riemann-Siegel correction terms (0..4);
        at least 1 is required below t = 1e4, where the bare main-sum
        remainder is too large.
    min_height: smallest t admitted on the Riemann-Siegel path.
    oracle_terms: Bernoulli-term count of the Euler-Maclaurin tail.
    """

    correction_order: int = 1
    min_height: float = 50.0
    oracle_terms: int = 12

    def __post_init__(self):
        if not 0 <= self.correction_order <= 4:
            raise ValueError(f"correction_order must be 0..4, got {self.correction_order}")
        if self.min_height < THETA_MIN_T:
            raise ValueError(f"min_height must be >= {THETA_MIN_T}")
        if not 1 <= self.oracle_terms <= len(_B2K):
            raise ValueError(f"oracle_terms must be 1..{len(_B2K)}")


DEFAULT_Z_CONFIG = ZEvalConfig()


def _as_array(t, minimum, what):
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if arr.size and float(arr.min()) < minimum:
        raise ValueError(f"{what} requires t >= {minimum:g}, got {float(arr.min()):g}")
    return arr


def theta(t, variant="exact_asymptotic", derivative_order=0):
    """Riemann-Siegel phase, or its derivative.

    ``exact_asymptotic`` adds the Stirling corrections 1/(48t) +
    7/(5760 t^3) to the main term; ``main_term`` is the bare
    (t/2)ln(t/2pi) - t/2 - pi/8.  ``derivative_order=1`` returns the
    phase rate, (1/2)ln(t/2pi) for the main term.
    """
    if variant not in ("exact_asymptotic", "main_term"):
        raise ValueError(f"unknown theta variant {variant!r}")
    if derivative_order not in (0, 1):
        raise ValueError("derivative_order must be 0 or 1")
    # The main term is a closed form valid for any positive t; only the
    # asymptotic corrections need height, so the t >= 10 floor binds there.
    floor_t = THETA_MIN_T if variant == "exact_asymptotic" else 1.0e-300
    tt = _as_array(t, floor_t, "theta")
    if derivative_order == 0:
        val = 0.5 * tt * np.log(tt / TWO_PI) - 0.5 * tt - math.pi / 8
        if variant == "exact_asymptotic":
            val = val + 1.0 / (48.0 * tt) + 7.0 / (5760.0 * tt ** 3)
    else:
        val = 0.5 * np.log(tt / TWO_PI)
        if variant == "exact_asymptotic":
            val = val - 1.0 / (48.0 * tt * tt) - 7.0 / (1920.0 * tt ** 4)
    return val if np.ndim(t) else float(val[0])


def theta_gamma(t):
    """Phase via the log-Gamma definition (independent of the expansion).

    Im ln Gamma(1/4 + it/2) - (t/2) ln pi.  Used to rotate the
    Euler-Maclaurin zeta value and as a cross-check oracle in tests.
    """
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    val = np.imag(loggamma(0.25 + 0.5j * tt)) - 0.5 * tt * math.log(math.pi)
    return val if np.ndim(t) else float(val[0])


def zero_spacing(t):
    """Mean spacing of consecutive Z oscillations at height t: pi / theta1'(t)."""
    return math.pi / theta(t, "main_term", 1)


def _theta_mod_2pi(tt):
    """theta(t) reduced to [0, 2pi), carried in 80-bit floats.

    The raw phase reaches ~1e10 at t = 1e9 where a double only resolves
    ~2e-6; the extended mantissa keeps the reduced phase good to ~1e-9.
    """
    tld = tt.astype(np.longdouble)
    th = 0.5 * tld * (np.log(tld) - _LOG_2PI_LD) - 0.5 * tld - _PI_8_LD
    th = np.mod(th, _TWO_PI_LD).astype(float)
    return th + 1.0 / (48.0 * tt) + 7.0 / (5760.0 * tt ** 3)


def _two_prod_err(a, b, ab):
    """Dekker residual: a*b - fl(a*b), exactly, without FMA."""
    split = 134217729.0  # 2^27 + 1
    a1 = split * a
    ah = a1 - (a1 - a)
    al = a - ah
    b1 = split * b
    bh = b1 - (b1 - b)
    bl = b - bh
    return ((ah * bh - ab) + ah * bl + al * bh) + al * bl


def _reduced_product(tc, lnn_hi, lnn_lo, careful):
    """t * ln n reduced mod 2pi, shape (len(tc), len(lnn_hi))."""
    x = tc[:, None] * lnn_hi[None, :]
    if not careful:
        return x
    err = _two_prod_err(tc[:, None], lnn_hi[None, :], x)
    m = np.rint(x / TWO_PI)
    r = ((x - m * _CW1) - m * _CW2) - m * _CW3
    return r + err + tc[:, None] * lnn_lo[None, :]


def _z_rs_raw(tt, n_terms):
    """Riemann-Siegel Z on a flat array, n_terms correction terms."""
    a = np.sqrt(tt / TWO_PI)
    n_cut = np.floor(a).astype(np.int64)
    p = a - n_cut
    nmax = int(n_cut.max())
    n = np.arange(1, nmax + 1, dtype=float)
    lnn_ld = np.log(n.astype(np.longdouble))
    lnn_hi = lnn_ld.astype(float)
    lnn_lo = (lnn_ld - lnn_hi).astype(float)
    weights = 1.0 / np.sqrt(n)
    careful = float(tt.max()) * math.log(nmax + 1.0) > _PLAIN_PHASE_LIMIT

    out = np.empty_like(tt)
    # keep working arrays near ~8M elements so temporaries stay cache-friendly
    chunk = max(64, min(_EVAL_CHUNK, (1 << 23) // max(nmax, 1)))
    for lo in range(0, tt.size, chunk):
        sl = slice(lo, min(lo + chunk, tt.size))
        tc = tt[sl]
        nc = n_cut[sl]
        th = _theta_mod_2pi(tc)
        ph = th[:, None] - _reduced_product(tc, lnn_hi, lnn_lo, careful)
        terms = np.cos(ph) * weights[None, :]
        terms[n[None, :] > nc[:, None]] = 0.0
        out[sl] = terms.sum(axis=1)

    sign = np.where(n_cut % 2 == 1, 1.0, -1.0)
    rem = correction_sum(p, 1.0 / a, n_terms)
    return 2.0 * out + sign * rem / np.sqrt(a)


def _zeta_em_one(t, n_bern):
    """Euler-Maclaurin zeta(1/2 + it) for one height."""
    s = 0.5 + 1j * t
    cut = max(48, int(math.ceil(0.6 * t)))
    n = np.arange(1, cut, dtype=float)
    total = np.sum(np.exp(-s * np.log(n)))
    total += 0.5 * cut ** (-s)
    total += cut ** (1.0 - s) / (s - 1.0)
    rising = s  # prod_{j=0}^{2k-2} (s+j), updated per term
    npow = cut ** (-s - 1.0)
    fact = 2.0
    for k in range(1, n_bern + 1):
        total += _B2K[k - 1] / fact * npow * rising
        rising = rising * (s + (2 * k - 1)) * (s + 2 * k)
        npow = npow / (cut * cut)
        fact = fact * (2 * k + 1) * (2 * k + 2)
    return total


def _z_em_raw(tt, n_bern):
    zeta_vals = np.array([_zeta_em_one(float(t), n_bern) for t in tt])
    rotated = np.exp(1j * theta_gamma(tt)) * zeta_vals
    residue = np.abs(rotated.imag) / (1.0 + np.abs(rotated.real))
    worst = float(residue.max()) if residue.size else 0.0
    if worst > 1.0e-8:
        raise AccuracyError(
            f"Euler-Maclaurin rotation left relative imaginary residue {worst:.3e}"
        )
    return rotated.real


def hardy_z(t, method="riemann_siegel", cfg=DEFAULT_Z_CONFIG):
    """Z(t) along the requested path; scalar in, scalar out (or array/array).

    riemann_siegel: main sum over n <= floor(sqrt(t/2pi)) plus
    cfg.correction_order correction terms; valid for t >= cfg.min_height.
    euler_maclaurin: direct zeta(1/2+it) rotated by the log-Gamma phase;
    the discarded imaginary part must stay below 1e-8 relative; valid for
    t <= 1e5 (cost grows linearly with t).
    """
    if method == "riemann_siegel":
        tt = _as_array(t, cfg.min_height, "hardy_z(riemann_siegel)")
        if cfg.correction_order < 1 and tt.size and float(tt.min()) < 1.0e4:
            raise AccuracyError(
                "correction_order >= 1 is required below t = 1e4 "
                "(main-sum remainder too large); raise correction_order "
                "or use the euler_maclaurin path"
            )
        val = _z_rs_raw(tt, cfg.correction_order)
    elif method == "euler_maclaurin":
        tt = _as_array(t, THETA_MIN_T, "hardy_z(euler_maclaurin)")
        if tt.size and float(tt.max()) > EM_MAX_T:
            raise AccuracyError(
                f"euler_maclaurin path is capped at t <= {EM_MAX_T:g}; "
                "use the riemann_siegel path above that"
            )
        val = _z_em_raw(tt, cfg.oracle_terms)
    else:
        raise ValueError(f"unknown hardy_z method {method!r}")
    return val if np.ndim(t) else float(val[0])


def omega(t):
    """Ladder weight: (1 - (1-gamma)/ln t) / (ln(t/2pi) + 2*gamma).

    Positive and strictly below 1/ln(t/2pi) on its domain; chosen so the
    local mean of omega * Z^2 is 1 - (1-gamma)/ln t.
    """
    tt = _as_array(t, OMEGA_MIN_T, "omega")
    val = (1.0 - (1.0 - EULER_GAMMA) / np.log(tt)) / (np.log(tt / TWO_PI) + 2.0 * EULER_GAMMA)
    return val if np.ndim(t) else float(val[0])


def omega_z2(t, cfg=DEFAULT_Z_CONFIG):
    """The ladder derivative omega(t) * Z(t)^2 (Riemann-Siegel path)."""
    z = hardy_z(t, "riemann_siegel", cfg)
    return omega(t) * np.square(z) if np.ndim(t) else omega(t) * z * z
