"""Hecke eigenvalue tables for level-1 eigenforms.

Delta (weight 12) is built in through the eta-product expansion
x * prod (1-x^n)^24, computed as the 8th power of Jacobi's sparse cube
series.  Small ranges are kept as exact big integers for identity tests;
large float tables (used by the moment sweeps) are produced by the same
convolution chain in float64 and validated against the exact prefix.

Other forms enter through coefficient files (see ingest_coefficients).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .arith import divisor_count, divisors, factorize, moebius

_EXACT_LIMIT_DEFAULT = 10**4
_FLOAT_MEMORY_CAP = 2**26  # entries; ~0.5 GB of float64 is the desk budget


class CoefficientError(ValueError):
    """Raised when an eigenvalue table fails validation."""


@dataclass
class EigenformData:
    """Normalized Hecke eigenvalues lambda(n) with form metadata."""

    kind: str                 # "holomorphic" | "maass"
    weight: float | None      # k for holomorphic forms
    kappa: float | None       # spectral parameter for Maass forms
    theta: float              # Ramanujan exponent theta_f
    epsilon: int              # root number of L(s, f)
    lam: np.ndarray           # lam[n] for 1 <= n <= n_max; index 0 unused
    label: str = "form"
    tau_exact: list[int] | None = None   # exact tau(n) prefix (Delta only)

    @property
    def n_max(self) -> int:
        return len(self.lam) - 1

    def lam_at(self, n: int) -> float:
        if not 1 <= n <= self.n_max:
            raise IndexError(
                f"lambda({n}) not tabulated for {self.label} (n_max={self.n_max}); "
                "rebuild with a larger table or extend_by_hecke")
        return float(self.lam[n])

    @property
    def is_holomorphic(self) -> bool:
        return self.kind == "holomorphic"


def jacobi_cube_sparse(limit: int) -> list[tuple[int, int]]:
    """(exponent, coefficient) pairs of prod (1-x^n)^3 up to x^limit."""
    out = []
    k = 0
    while k * (k + 1) // 2 <= limit:
        out.append((k * (k + 1) // 2, (-1) ** k * (2 * k + 1)))
        k += 1
    return out


def _eta24_exact(limit: int) -> list[int]:
    """Coefficients of prod (1-x^n)^24 for exponents 0..limit, exact."""
    sparse = jacobi_cube_sparse(limit)
    dense = [0] * (limit + 1)
    for e1, c1 in sparse:                      # eta^6 = (eta^3)^2
        for e2, c2 in sparse:
            if e1 + e2 > limit:
                break
            dense[e1 + e2] += c1 * c2
    for _ in range(6):                         # six more eta^3 factors
        nxt = [0] * (limit + 1)
        for e, c in sparse:
            for i in range(limit + 1 - e):
                nxt[i + e] += c * dense[i]
        dense = nxt
    return dense


@lru_cache(maxsize=8)
def ramanujan_tau_exact(n_max: int) -> tuple[int, ...]:
    """Exact tau(1..n_max) as big integers."""
    eta = _eta24_exact(n_max - 1)
    return tuple(eta[n - 1] for n in range(1, n_max + 1))


def _eta24_float(limit: int) -> np.ndarray:
    sparse = jacobi_cube_sparse(limit)
    exps = np.array([e for e, _ in sparse], dtype=np.int64)
    coefs = np.array([c for _, c in sparse], dtype=np.float64)
    dense = np.zeros(limit + 1)
    for e1, c1 in sparse:                      # eta^6, pairwise sparse product
        keep = exps <= limit - e1
        np.add.at(dense, e1 + exps[keep], c1 * coefs[keep])
    for _ in range(6):
        nxt = np.zeros(limit + 1)
        for e, c in sparse:
            if e > limit:
                break
            nxt[e:] += c * dense[:limit + 1 - e]
        dense = nxt
    return dense


def _cache_dir() -> Path:
    root = os.environ.get("MOMENTLAB_CACHE_DIR")
    path = Path(root) if root else Path.home() / ".cache" / "momentlab"
    path.mkdir(parents=True, exist_ok=True)
    return path


def delta_coefficients(n_max: int, exact_limit: int | None = None) -> EigenformData:
    """EigenformData for Delta: lambda(n) = tau(n) / n^{11/2}, theta = 0."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if n_max > _FLOAT_MEMORY_CAP:
        raise MemoryError(f"n_max={n_max} beyond the desk memory budget")
    exact_limit = min(exact_limit or _EXACT_LIMIT_DEFAULT, n_max)

    lam = _delta_lambda_cached(n_max)
    tau_exact = list(ramanujan_tau_exact(exact_limit))
    # float table must agree with the exact prefix
    ns = np.arange(1, exact_limit + 1, dtype=np.float64)
    ref = np.array([float(t) for t in tau_exact]) / ns ** 5.5
    err = np.max(np.abs(lam[1:exact_limit + 1] - ref) / (1.0 + np.abs(ref)))
    if err > 1e-9:
        raise CoefficientError(f"float tau table deviates from exact values by {err}")
    return EigenformData("holomorphic", 12.0, None, 0.0, 1, lam,
                         label="delta", tau_exact=tau_exact)


@lru_cache(maxsize=4)
def _delta_lambda_cached(n_max: int) -> np.ndarray:
    cache = _cache_dir() / "delta_lambda.npy"
    if cache.exists():
        stored = np.load(cache)
        if len(stored) >= n_max + 1:
            return stored[:n_max + 1]
    eta = _eta24_float(n_max - 1)
    ns = np.arange(n_max + 1, dtype=np.float64)
    lam = np.zeros(n_max + 1)
    lam[1:] = eta[:n_max] / ns[1:] ** 5.5
    np.save(cache, lam)
    return lam


def _parse_coefficient_file(path: Path):
    meta: dict[str, str] = {}
    entries: dict[int, float] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) >= 2:
                    meta[parts[0].lower()] = parts[1]
                continue
            parts = line.split()
            if len(parts) != 2:
                raise CoefficientError(f"{path}:{lineno}: expected 'n lambda(n)'")
            try:
                n = int(parts[0])
                val = float(parts[1])
            except ValueError as exc:
                raise CoefficientError(f"{path}:{lineno}: {exc}") from exc
            entries[n] = val
    return meta, entries


def resolve_coefficient_path(path_or_name: str) -> Path:
    path = Path(path_or_name)
    if path.exists():
        return path
    search = os.environ.get("MOMENTLAB_COEFF_DIR")
    if search:
        candidate = Path(search) / path_or_name
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"coefficient file {path_or_name!r} not found "
                            "(also searched MOMENTLAB_COEFF_DIR)")


def ingest_coefficients(path_or_name: str, kind: str | None = None,
                        parameter: float | None = None,
                        epsilon: int | None = None,
                        theta: float | None = None) -> EigenformData:
    """Load and validate an eigenvalue table from a coefficient file.

    Header lines '# kind ...', '# weight ...'/'# kappa ...', '# epsilon ...',
    '# theta ...' provide defaults; explicit arguments override them.
    """
    path = resolve_coefficient_path(path_or_name)
    meta, entries = _parse_coefficient_file(path)
    kind = kind or meta.get("kind")
    if kind not in ("holomorphic", "maass"):
        raise CoefficientError(f"unknown or missing form kind {kind!r}")
    if parameter is None:
        key = "weight" if kind == "holomorphic" else "kappa"
        if key not in meta:
            raise CoefficientError(f"missing {key} for {kind} form")
        parameter = float(meta[key])
    if epsilon is None:
        epsilon = int(meta.get("epsilon", "1"))
    if theta is None:
        theta = float(meta.get("theta", "0" if kind == "holomorphic" else str(7 / 64)))
    if kind == "maass" and epsilon == -1:
        raise CoefficientError(
            "Maass form with root number -1 rejected: the mixed moment "
            "vanishes identically by the chi <-> conj(chi) symmetry, so there "
            "is nothing to compute")

    n_max = max(entries)
    if set(entries) != set(range(1, n_max + 1)):
        raise CoefficientError(f"{path}: coefficients must cover n = 1..{n_max} without gaps")
    lam = np.zeros(n_max + 1)
    for n, v in entries.items():
        lam[n] = v
    form = EigenformData(kind,
                         parameter if kind == "holomorphic" else None,
                         parameter if kind == "maass" else None,
                         theta, epsilon, lam, label=path.stem)
    validate_eigenform(form)
    return form


def validate_eigenform(form: EigenformData, tol: float = 1e-6) -> None:
    """Hecke multiplicativity and Ramanujan-on-average checks."""
    lam = form.lam
    if abs(lam[1] - 1.0) > tol:
        raise CoefficientError(f"lambda(1) = {lam[1]} != 1")
    n_max = form.n_max
    for m in range(2, n_max + 1):
        for n in range(m, n_max // m + 1):
            expected = sum(lam[m * n // (d * d)] for d in divisors(math.gcd(m, n))
                           if m * n % (d * d) == 0)
            if abs(lam[m] * lam[n] - expected) > tol:
                raise CoefficientError(
                    f"Hecke multiplicativity violated at (m,n)=({m},{n}): "
                    f"lambda({m})*lambda({n}) = {lam[m] * lam[n]:.9g} vs {expected:.9g}")
    bound = np.array([divisor_count(n) * n ** form.theta for n in range(1, n_max + 1)])
    worst = np.max(np.abs(lam[1:]) - bound)
    if worst > tol:
        raise CoefficientError(f"|lambda(n)| exceeds d(n) n^theta by {worst}")


def hecke_violations(form: EigenformData, n_max: int) -> int:
    """Count of (m, n) pairs, mn <= n_max, violating the Hecke relation.

    For the built-in form the cleared-denominator identity
    tau(m) tau(n) = sum_{d | (m,n)} d^11 tau(mn / d^2) is checked in exact
    integers; otherwise the float lambda relation is checked to 1e-6.
    """
    exact = form.tau_exact is not None and len(form.tau_exact) >= n_max
    bad = 0
    if exact:
        tau = [0] + list(form.tau_exact[:n_max])
        for m in range(2, n_max + 1):
            for n in range(m, n_max // m + 1):
                rhs = sum(d**11 * tau[m * n // (d * d)]
                          for d in divisors(math.gcd(m, n)))
                if tau[m] * tau[n] != rhs:
                    bad += 1
    else:
        lam = form.lam
        for m in range(2, n_max + 1):
            for n in range(m, n_max // m + 1):
                rhs = sum(lam[m * n // (d * d)] for d in divisors(math.gcd(m, n)))
                if abs(lam[m] * lam[n] - rhs) > 1e-6:
                    bad += 1
    return bad


def extend_by_hecke(form: EigenformData, n_max: int) -> EigenformData:
    """Extend a prime-power-complete table multiplicatively to n_max.

    Requires lambda(p^e) to be present for every prime power p^e <= n_max;
    this is the explicit opt-in alternative to failing loudly on short tables.
    """
    if n_max <= form.n_max:
        return form
    lam = np.zeros(n_max + 1)
    lam[:form.n_max + 1] = form.lam
    for n in range(form.n_max + 1, n_max + 1):
        p, e = factorize(n).factors[0]
        pe = p**e
        if pe == n:
            raise CoefficientError(
                f"cannot extend: lambda({n}) is a prime power beyond the table")
        lam[n] = lam[pe] * lam[n // pe]
    return EigenformData(form.kind, form.weight, form.kappa, form.theta,
                         form.epsilon, lam, label=form.label,
                         tau_exact=form.tau_exact)


@dataclass(frozen=True)
class VarpiTable:
    """Coprime-removal coefficients varpi_lambda / varpi_tau for one modulus."""

    q: int
    entries: tuple[tuple[int, float, float], ...]   # (delta, varpi_lambda, varpi_tau)

    def as_dict(self) -> dict[int, tuple[float, float]]:
        return {d: (wl, wt) for d, wl, wt in self.entries}


def varpi_table(form: EigenformData, q: int) -> VarpiTable:
    """varpi_lambda(delta, q) = sum_{k l^2 = delta, k l | q} mu(l) mu(kl) lambda(k),
    and the divisor-function analogue, over all delta = k l^2 with kl | q."""
    acc: dict[int, tuple[float, float]] = {}
    for kl in divisors(q):
        for l in divisors(kl):
            k = kl // l
            if form.n_max < k:
                raise IndexError(f"varpi_table needs lambda({k}) but n_max={form.n_max}")
            coef = moebius(l) * moebius(kl)
            if coef == 0:
                continue
            delta = k * l * l
            wl, wt = acc.get(delta, (0.0, 0.0))
            acc[delta] = (wl + coef * form.lam_at(k), wt + coef * divisor_count(k))
    entries = tuple(sorted((d, wl, wt) for d, (wl, wt) in acc.items()))
    return VarpiTable(q, entries)


def coprime_removal_residual(form: EigenformData, q: int, F: dict[int, float],
                             use_tau: bool = False) -> float:
    """|sum_{(n,q)=1} lambda(n) F(n) - sum_delta varpi(delta,q) sum_n lambda(n) F(delta n)|."""
    support = max(F) if F else 1
    if support > 10**4:
        raise ValueError("test-function support exceeds the desk budget")
    table = varpi_table(form, q)

    def coeff(n):
        return divisor_count(n) if use_tau else form.lam_at(n)

    lhs = sum(coeff(n) * w for n, w in F.items() if math.gcd(n, q) == 1)
    rhs = 0.0
    for delta, wl, wt in table.entries:
        weight = wt if use_tau else wl
        if weight == 0.0:
            continue
        rhs += weight * sum(coeff(n) * F[delta * n] for n in range(1, support // delta + 1)
                            if delta * n in F)
    return abs(lhs - rhs)


def coprime_removal_exact_delta(q: int, m_max: int) -> int:
    """Exact integer residual of the coprime-removal identity for Delta.

    Checks, coefficient by coefficient for every m <= m_max, that
        sum_{k l^2 | m, kl | q} mu(l) mu(kl) l^11 tau(k) tau(m / (k l^2))
    equals [gcd(m,q)=1] * tau(m); this is the identity with the n^{11/2}
    normalization cleared, so it is exact in big-integer arithmetic.
    Returns the sum of absolute coefficient defects (0 iff the identity holds).
    """
    tau = (0,) + ramanujan_tau_exact(m_max)
    defect = 0
    kl_pairs = [(kl // l, l) for kl in divisors(q) for l in divisors(kl)
                if moebius(l) * moebius(kl // l * l) != 0]
    for m in range(1, m_max + 1):
        total = 0
        for k, l in kl_pairs:
            kl2 = k * l * l
            if m % kl2 == 0:
                total += moebius(l) * moebius(k * l) * l**11 * tau[k] * tau[m // kl2]
        expected = tau[m] if math.gcd(m, q) == 1 else 0
        defect += abs(total - expected)
    return defect


def coprime_removal_exact_tau(q: int, m_max: int) -> int:
    """Same exact identity with the divisor function in place of lambda."""
    defect = 0
    kl_pairs = [(kl // l, l) for kl in divisors(q) for l in divisors(kl)
                if moebius(l) * moebius(kl // l * l) != 0]
    for m in range(1, m_max + 1):
        total = 0
        for k, l in kl_pairs:
            kl2 = k * l * l
            if m % kl2 == 0:
                total += moebius(l) * moebius(k * l) * divisor_count(k) * divisor_count(m // kl2)
        expected = divisor_count(m) if math.gcd(m, q) == 1 else 0
        defect += abs(total - expected)
    return defect
