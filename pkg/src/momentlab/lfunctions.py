"""Critical-point L-values: AFE weights, the triple-product AFE, and
independent oracle routes (Hurwitz-zeta Dirichlet values, a single twisted
AFE, smoothed L(1, f)).

The Mellin-Barnes weight V(x) is evaluated by trapezoid quadrature on a
vertical line: Re s = 3 for x > 1, and Re s = -1/4 (past the 1/s pole,
picking up the residue 1) for x <= 1 so small-x values are free of the
x^{-c} cancellation blow-up.  Values are memoized on a log-spaced grid
with cubic-spline interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import loggamma

from .arith import divisor_count_sieve
from .characters import CharacterGroup, GaussData, gauss_eps
from .eigenforms import EigenformData

_CONTOUR_T = 40.0
_CONTOUR_H = 0.05
_GRID_LO, _GRID_HI = 1e-12, 1e6
_GRID_PER_DECADE = 120


class ParityVanishing(ValueError):
    """AFE requested for a character with root number epsilon(f, chi) = -1."""


def _log_gamma_ratio_triple(form: EigenformData, parity_a: int):
    """log of L_inf(1/2+s, f x chi) L_inf(1/2+s, conj chi)^2 normalized at s=0."""
    a = parity_a
    if form.is_holomorphic:
        k = form.weight

        def log_G(s):
            val = -s * np.log(2 * np.pi) + loggamma(k / 2 + s) - loggamma(k / 2)
            val = val + 2 * (-(s / 2) * np.log(np.pi)
                             + loggamma((0.5 + s + a) / 2) - loggamma((0.5 + a) / 2))
            return val
    else:
        kap = form.kappa

        def log_G(s):
            val = (-s * np.log(np.pi)
                   + loggamma((0.5 + s + 1j * kap + a) / 2) - loggamma((0.5 + 1j * kap + a) / 2)
                   + loggamma((0.5 + s - 1j * kap + a) / 2) - loggamma((0.5 - 1j * kap + a) / 2))
            val = val + 2 * (-(s / 2) * np.log(np.pi)
                             + loggamma((0.5 + s + a) / 2) - loggamma((0.5 + a) / 2))
            return val
    return log_G


def _log_gamma_ratio_twist(form: EigenformData, parity_a: int):
    """log of L_inf(1/2+s, f x chi) normalized at s=0."""
    a = parity_a
    if form.is_holomorphic:
        k = form.weight

        def log_G(s):
            return -s * np.log(2 * np.pi) + loggamma(k / 2 + s) - loggamma(k / 2)
    else:
        kap = form.kappa

        def log_G(s):
            return (-s * np.log(np.pi)
                    + loggamma((0.5 + s + 1j * kap + a) / 2) - loggamma((0.5 + 1j * kap + a) / 2)
                    + loggamma((0.5 + s - 1j * kap + a) / 2) - loggamma((0.5 - 1j * kap + a) / 2))
    return log_G


@dataclass
class WeightFunction:
    """Memoized inverse-Mellin weight x -> (1/2 pi i) int G(s) x^{-s} ds / s."""

    label: str
    _spline_small: CubicSpline      # over log x in [log 1e-12, 0]
    _spline_large: CubicSpline      # over log x in [0, log 1e6]
    grid_x: np.ndarray
    grid_v: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if np.any(x <= 0):
            raise ValueError("weight argument must be positive")
        out = np.empty_like(x)
        lo = x < _GRID_LO
        hi = x > _GRID_HI
        small = (~lo) & (x <= 1.0)
        large = (~hi) & (x > 1.0)
        out[lo] = self._spline_small(math.log(_GRID_LO))
        out[hi] = 0.0
        if np.any(small):
            out[small] = self._spline_small(np.log(x[small]))
        if np.any(large):
            out[large] = self._spline_large(np.log(x[large]))
        return float(out[0]) if scalar else out

    def cutoff(self, tol: float) -> float:
        """Smallest grid x beyond which |V| stays below tol."""
        below = np.abs(self.grid_v) < tol
        for i in range(len(self.grid_x)):
            if below[i:].all():
                return float(self.grid_x[i])
        return float(self.grid_x[-1])


def _contour_values(log_G, c: float, T: float, h: float):
    t = np.arange(-T, T + h / 2, h)
    s = c + 1j * t
    return t, np.exp(log_G(s)) / s


def _build_weight(log_G, label: str, T: float = _CONTOUR_T, h: float = _CONTOUR_H) -> WeightFunction:
    n_lo = int(round(-math.log10(_GRID_LO))) * _GRID_PER_DECADE + 1
    n_hi = int(round(math.log10(_GRID_HI))) * _GRID_PER_DECADE + 1
    xs_small = np.logspace(math.log10(_GRID_LO), 0.0, n_lo)
    xs_large = np.logspace(0.0, math.log10(_GRID_HI), n_hi)

    # x <= 1: contour at Re s = -1/4 (past 1/s), residue 1 added back
    _, g_left = _contour_values(log_G, -0.25, T, h)
    v_small = np.empty_like(xs_small)
    for i0 in range(0, len(xs_small), 256):
        xs = xs_small[i0:i0 + 256]
        phases = xs[:, None] ** (0.25 - 1j * np.arange(-T, T + h / 2, h))[None, :]
        v_small[i0:i0 + 256] = 1.0 + (h / (2 * np.pi)) * np.real(phases @ g_left)

    # x > 1: contour at Re s = 3
    _, g_right = _contour_values(log_G, 3.0, T, h)
    v_large = np.empty_like(xs_large)
    for i0 in range(0, len(xs_large), 256):
        xs = xs_large[i0:i0 + 256]
        phases = xs[:, None] ** (-3.0 - 1j * np.arange(-T, T + h / 2, h))[None, :]
        v_large[i0:i0 + 256] = (h / (2 * np.pi)) * np.real(phases @ g_right)

    grid_x = np.concatenate([xs_small, xs_large[1:]])
    grid_v = np.concatenate([v_small, v_large[1:]])
    return WeightFunction(label,
                          CubicSpline(np.log(xs_small), v_small),
                          CubicSpline(np.log(xs_large), v_large),
                          grid_x, grid_v)


_WEIGHT_CACHE: dict[tuple, WeightFunction] = {}


def _form_key(form: EigenformData) -> tuple:
    return (form.kind, form.weight, form.kappa)


def triple_weight(form: EigenformData, parity_a: int) -> WeightFunction:
    """V_{f, a}: the weight of the triple-product AFE (parity a in {0, 1})."""
    if parity_a not in (0, 1):
        raise ValueError("parity exponent must be 0 or 1")
    key = ("triple", _form_key(form), parity_a)
    if key not in _WEIGHT_CACHE:
        _WEIGHT_CACHE[key] = _build_weight(
            _log_gamma_ratio_triple(form, parity_a), f"V[{form.kind},a={parity_a}]")
    return _WEIGHT_CACHE[key]


def twist_weight(form: EigenformData, parity_a: int = 0) -> WeightFunction:
    key = ("twist", _form_key(form), parity_a)
    if key not in _WEIGHT_CACHE:
        _WEIGHT_CACHE[key] = _build_weight(
            _log_gamma_ratio_twist(form, parity_a), f"Vtwist[{form.kind}]")
    return _WEIGHT_CACHE[key]


def weight_V(x: float, parity_a: int, form: EigenformData) -> float:
    """Scalar evaluation of the triple-product AFE weight."""
    return float(triple_weight(form, parity_a)(x))


def weight_V_reference(x: float, parity_a: int, form: EigenformData) -> float:
    """Refined-quadrature oracle: T doubled, h halved, no interpolation."""
    log_G = _log_gamma_ratio_triple(form, parity_a)
    c = -0.25 if x <= 1.0 else 3.0
    t, g = _contour_values(log_G, c, 2 * _CONTOUR_T, _CONTOUR_H / 2)
    val = (_CONTOUR_H / 2) / (2 * np.pi) * np.real(np.sum(x ** (-c - 1j * t) * g))
    return float(val + (1.0 if x <= 1.0 else 0.0))


# ---------------------------------------------------------------------------
# Root numbers


@dataclass(frozen=True)
class RootNumbers:
    eps_chi: complex
    eps_of_chi: complex      # i^{-a} eps_chi
    eps_twist: complex       # eps(f x chi)
    eps_pair: int            # eps(f, chi) in {-1, +1}


def root_numbers(group: CharacterGroup, index: int, form: EigenformData) -> RootNumbers:
    gd: GaussData = gauss_eps(group, index)
    sigma = int(group.parity[index])
    if form.is_holomorphic:
        eps_twist = form.epsilon * gd.eps_chi**2
        eps_pair = sigma * form.epsilon
    else:
        eps_twist = sigma * form.epsilon * gd.eps_chi**2
        eps_pair = form.epsilon
    return RootNumbers(gd.eps_chi, gd.eps, eps_twist, eps_pair)


# ---------------------------------------------------------------------------
# Triple-product AFE


def afe_triple_product(group: CharacterGroup, index: int, form: EigenformData,
                       v_tol: float = 1e-12) -> complex:
    """L(1/2, f x chi) L(1/2, conj chi)^2 via the two-sum AFE.

    Requires a primitive character with eps(f, chi) = +1; truncates where the
    weight has decayed below v_tol.
    """
    q = group.modulus
    if q == 1:
        raise ValueError("the twisted family starts at q >= 3; no twist mod 1")
    if not group.is_primitive[index]:
        raise ValueError("AFE requires a primitive character")
    rn = root_numbers(group, index, form)
    if rn.eps_pair != 1:
        raise ParityVanishing(
            "eps(f, chi) = -1: the triple product L-value pairs to zero by "
            "parity and the root-number-one AFE does not apply")
    sigma = int(group.parity[index])
    parity_a = 0 if sigma == 1 else 1
    V = triple_weight(form, parity_a)
    x_cut = V.cutoff(v_tol)
    X = int(math.ceil(x_cut * q * q))
    if form.n_max < X:
        raise IndexError(f"AFE needs lambda up to {X} but table has {form.n_max}")

    tau = divisor_count_sieve(X)
    chi_vals = group.values[index]
    ns = np.arange(X + 1, dtype=np.float64)
    inv_sqrt = np.zeros(X + 1)
    inv_sqrt[1:] = 1.0 / np.sqrt(ns[1:])
    chi_of = chi_vals[np.arange(X + 1) % q]

    total = 0j
    for m in range(1, X + 1):
        cm = chi_of[m]
        if cm == 0:
            continue
        n_hi = X // m
        n_idx = np.arange(1, n_hi + 1)
        weights = V(m * ns[1:n_hi + 1] / (q * q)) * inv_sqrt[1:n_hi + 1] * inv_sqrt[m]
        lam_m_tau_n = form.lam[m] * tau[1:n_hi + 1]
        tau_m_lam_n = tau[m] * form.lam[1:n_hi + 1]
        inner = np.sum((lam_m_tau_n + tau_m_lam_n) * weights * np.conj(chi_of[n_idx]))
        total += cm * inner
    return complex(total)


# ---------------------------------------------------------------------------
# Oracle route 1: L(1/2, chi) through Hurwitz zeta


_BERNOULLI = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510]


def hurwitz_zeta(s: complex, x: float, shift: int = 50, corrections: int = 8) -> complex:
    """Euler-Maclaurin Hurwitz zeta, accurate to ~1e-13 for s near 1/2."""
    if s == 1:
        raise ValueError("pole at s = 1")
    total = sum((n + x) ** (-s) for n in range(shift))
    K = shift + x
    total += K ** (1 - s) / (s - 1) + 0.5 * K ** (-s)
    poch = s
    Kpow = K ** (-s - 1)
    fact = 1.0
    for j in range(1, corrections + 1):
        fact *= (2 * j - 1) * (2 * j)
        total += _BERNOULLI[j - 1] / fact * poch * Kpow
        poch *= (s + 2 * j - 1) * (s + 2 * j)
        Kpow /= K * K
    return total


def dirichlet_L_half(group: CharacterGroup, index: int,
                     shift: int = 50, corrections: int = 8) -> complex:
    """L(1/2, chi) = q^{-1/2} sum_a chi(a) zeta_H(1/2, a/q); non-principal chi."""
    q = group.modulus
    if q > 10**4:
        raise ValueError("oracle limited to q <= 1e4")
    expo = group.exponents[index]
    if q == 1 or np.all(expo[expo >= 0] == 0):
        raise ValueError("principal character rejected (pole handling out of scope)")
    total = 0j
    for a in range(1, q + 1):
        c = group.values[index, a % q]
        if c != 0:
            total += c * hurwitz_zeta(0.5, a / q, shift, corrections)
    return total / math.sqrt(q)


def dirichlet_fe_residual(group: CharacterGroup, index: int) -> float:
    """|L(1/2, chi) - eps(chi) L(1/2, conj chi)| for primitive chi."""
    rn = gauss_eps(group, index)
    L = dirichlet_L_half(group, index)
    conj_index = conjugate_index(group, index)
    Lbar = dirichlet_L_half(group, conj_index)
    return abs(L - rn.eps * Lbar)


def conjugate_index(group: CharacterGroup, index: int) -> int:
    target = group.exponents[index].copy()
    units = target >= 0
    conj = np.where(units, (-target) % group.group_exponent, -1)
    for j in range(group.n_chars):
        if np.array_equal(group.exponents[j], conj):
            return j
    raise RuntimeError("conjugate character not found (corrupt table)")


# ---------------------------------------------------------------------------
# Oracle route 2: L(1/2, f x chi) by a single balanced AFE


def twisted_L_half(group: CharacterGroup, index: int, form: EigenformData) -> complex:
    """Balanced AFE of conductor q^2 with root number eps(f x chi)."""
    q = group.modulus
    if not group.is_primitive[index]:
        raise ValueError("twisted AFE requires a primitive character")
    if not form.is_holomorphic and form.epsilon != 1:
        raise ValueError("Maass forms enter only with root number +1")
    rn = root_numbers(group, index, form)
    parity_a = 0 if group.parity[index] == 1 else 1
    Vf = twist_weight(form, parity_a)
    x_cut = Vf.cutoff(1e-14)
    n_hi = int(math.ceil(x_cut * q))
    if form.n_max < n_hi:
        raise IndexError(f"twisted AFE needs lambda up to {n_hi}")
    ns = np.arange(1, n_hi + 1)
    w = Vf(ns / q) / np.sqrt(ns)
    chi_n = group.values[index, ns % q]
    lam = form.lam[1:n_hi + 1]
    first = np.sum(lam * w * chi_n)
    second = np.sum(lam * w * np.conj(chi_n))
    return complex(first + rn.eps_twist * second)


def twisted_fe_residual(group: CharacterGroup, index: int, form: EigenformData) -> float:
    """Internal functional-equation consistency of the balanced twisted AFE."""
    rn = root_numbers(group, index, form)
    L = twisted_L_half(group, index, form)
    Lbar = twisted_L_half(group, conjugate_index(group, index), form)
    return abs(L - rn.eps_twist * Lbar)


# ---------------------------------------------------------------------------
# L(1, f) and zeta(2)


def zeta_two() -> float:
    return math.pi**2 / 6.0


def L_one_f(form: EigenformData, X: float = 1e4) -> float:
    """Smoothed sum_n lambda(n)/n with weight e^{-t}(1 + t + t^2/2).

    The polynomial factor cancels the Mellin poles at s = -1 and s = -2, so
    the smoothing error is O(X^{-3}).
    """
    n_hi = int(45 * X)
    if form.n_max < n_hi:
        raise IndexError(f"L(1,f) needs lambda up to {n_hi}; table has {form.n_max}")
    ns = np.arange(1, n_hi + 1, dtype=np.float64)
    t = ns / X
    w = np.exp(-t) * (1.0 + t + 0.5 * t * t)
    val = float(np.sum(form.lam[1:n_hi + 1] / ns * w))
    return val
