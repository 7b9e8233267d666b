import math

import numpy as np
import pytest

from momentlab.arith import divisor_count
from momentlab.eigenforms import (CoefficientError, coprime_removal_exact_delta,
                                  coprime_removal_exact_tau, delta_coefficients,
                                  extend_by_hecke, hecke_violations,
                                  ingest_coefficients, ramanujan_tau_exact,
                                  validate_eigenform, varpi_table)


def test_first_tau_values():
    tau = ramanujan_tau_exact(12)
    assert tau[:7] == (1, -24, 252, -1472, 4830, -6048, -16744)
    assert tau[11] == -370944     # tau(12) = tau(3) tau(4)


def test_tau_congruence_mod_691():
    # tau(n) = sigma_11(n) mod 691
    tau = ramanujan_tau_exact(50)
    for n in range(1, 51):
        sigma11 = sum(d**11 for d in range(1, n + 1) if n % d == 0)
        assert (tau[n - 1] - sigma11) % 691 == 0


def test_float_table_matches_exact(delta_small):
    tau = ramanujan_tau_exact(2000)
    for n in (1, 2, 100, 1999):
        assert delta_small.lam[n] == pytest.approx(tau[n - 1] / n**5.5, rel=1e-12)


def test_hecke_exact_small():
    f = delta_coefficients(2000)
    assert hecke_violations(f, 2000) == 0


def test_deligne_bound_exact_small():
    tau = ramanujan_tau_exact(2000)
    for n in range(1, 2001):
        assert tau[n - 1] ** 2 <= divisor_count(n) ** 2 * n**11


def test_varpi_values(delta_small):
    t = varpi_table(delta_small, 6).as_dict()
    assert t[1] == (1.0, 1.0)
    # delta = 4 comes only from (k, l) = (1, 2): mu(2) mu(2) lambda(1) = 1
    assert t[4] == (1.0, 1.0)
    # delta = 6 from (k,l) = (6,1): mu(1) mu(6) lambda(6)
    assert t[6][0] == pytest.approx(float(delta_small.lam[6]))
    assert set(t) == {1, 2, 3, 4, 6, 9, 12, 18, 36}


@pytest.mark.parametrize("q", [2, 6, 12, 30])
def test_coprime_removal_exact(q):
    assert coprime_removal_exact_delta(q, 300) == 0
    assert coprime_removal_exact_tau(q, 300) == 0


def test_ingest_roundtrip(tmp_path, delta_small):
    path = tmp_path / "form.txt"
    lines = ["# kind holomorphic", "# weight 12", "# epsilon 1", "# theta 0"]
    lines += [f"{n} {float(delta_small.lam[n])!r}" for n in range(1, 201)]
    path.write_text("\n".join(lines))
    f = ingest_coefficients(str(path))
    assert f.n_max == 200
    assert f.lam[2] == pytest.approx(delta_small.lam[2])
    validate_eigenform(f)


def test_ingest_rejects_gaps(tmp_path):
    path = tmp_path / "gap.txt"
    path.write_text("# kind holomorphic\n# weight 12\n1 1.0\n3 0.5\n")
    with pytest.raises(CoefficientError):
        ingest_coefficients(str(path))


def test_ingest_rejects_odd_maass(tmp_path, delta_small):
    path = tmp_path / "odd.txt"
    lines = ["# kind maass", "# kappa 9.5", "# epsilon -1", "# theta 0.109375"]
    lines += [f"{n} {delta_small.lam[n]!r}" for n in range(1, 31)]
    path.write_text("\n".join(lines))
    with pytest.raises(CoefficientError):
        ingest_coefficients(str(path))


def test_extend_by_hecke(delta_small):
    # 90..96 contains no prime powers, so a table through 89 extends
    f = delta_coefficients(89)
    g = extend_by_hecke(f, 96)
    full = delta_coefficients(96)
    assert np.allclose(g.lam[:97], full.lam[:97], atol=1e-12)
    # 67 is prime: a table ending at 66 cannot be extended past it
    with pytest.raises(CoefficientError):
        extend_by_hecke(delta_coefficients(66), 90)


def test_lam_at_bounds(delta_small):
    with pytest.raises(IndexError):
        delta_small.lam_at(delta_small.n_max + 1)
