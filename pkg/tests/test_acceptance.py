"""End-to-end acceptance runs, one per verified property.

Each test runs its pipeline at the production configuration, asserts the
numeric targets and the wall-clock budget, and prints a single
``[PASS]``/``[FAIL]`` line so the outcome is visible without ``-s``.
"""
import math
import time

import pytest

from coupled_hartree import bounds
from coupled_hartree.experiments import (
    run_coercive_ground_state,
    run_constants,
    run_coulomb_audit,
    run_fibering_audit,
    run_gradient_audit,
    run_inequality_suite,
    run_limit_comparison,
    run_multibump,
    run_nehari_ground_state,
    run_nonexistence,
    run_scalar_reference,
    run_symmetry_breaking,
)


@pytest.fixture
def report(capsys):
    """Run ``fn``, check its budget and assertions, and print one status line."""

    def run(label, fn, budget, verify):
        t0 = time.perf_counter()
        res = fn()
        elapsed = time.perf_counter() - t0
        failures = [name for name, ok in res.checks.items() if not ok]
        try:
            verify(res)
            assert not failures, f"failed checks: {failures}"
            assert elapsed < budget, f"runtime {elapsed:.1f} s exceeds {budget} s"
            status = "PASS"
        except AssertionError:
            status = "FAIL"
            raise
        finally:
            with capsys.disabled():
                print(f"\n[{status}] {label} ({elapsed:.1f} s, budget {budget} s)")
        return res

    return run


def test_01_constants(report):
    targets = {
        "d_lions": 2.37841,
        "nonexistence_bound": 1.37841,
        "coercive_upper": 0.48650,
        "s_c": 1.28000,
        "d_c": 1.81019,
        "g_max": 1.68179,
    }

    def verify(res):
        for name, target in targets.items():
            value, oracle = res.values[name], res.values[f"{name}_oracle"]
            assert abs(value - oracle) <= 1e-8 * abs(oracle), name
            # targets are quoted to five decimals (coercive_upper is truncated)
            assert abs(value - target) < 1e-5, name

    report("01 constants and scan oracles", run_constants, 1.0, verify)


def test_02_coulomb(report):
    def verify(res):
        assert abs(res.values["phi0_solver"] / (2 * math.pi) - 1) < 0.01
        for name in ("gaussian", "shell", "two_scale"):
            assert res.values[f"radial_vs_cubic_{name}"] < 0.01

    report("02 Coulomb solver, phi(0) and radial oracle", lambda: run_coulomb_audit(n=64, L=8.0), 30.0, verify)


def test_03_gradient(report):
    def verify(res):
        assert res.values["cases"] == 50
        assert res.values["worst_relative_error"] < 1e-5

    report("03 gradient vs finite differences, 50 cases on 16^3", lambda: run_gradient_audit(50, 16), 120.0, verify)


def test_04_fibering(report):
    def verify(res):
        assert res.values["worst_root_residual"] < 1e-12
        assert res.values["sign_failures"] == 0
        assert res.values["worst_branch_disagreement"] < 1e-10
        for key in ("ansatz_well_beta_20", "ansatz_well_beta_50"):
            r = res.values[key]
            assert r["t_minus"] < (2 / (4 - 3.5)) ** (1 / 1.5) < r["t_plus"]

    report("04 fibering roots, branches and ansatz ordering", lambda: run_fibering_audit(300), 10.0, verify)


def test_05_scalar_reference(report):
    def verify(res):
        assert abs(res.values["nehari"]) < 1e-6 and abs(res.values["pohozaev"]) < 1e-6
        assert abs(res.values["energy"] / res.values["alpha_formula"] - 1) < 0.02

    report("05 scalar ground state audits and level formula", run_scalar_reference, 30.0, verify)


def test_06_nonexistence(report):
    def verify(res):
        bound = bounds.nonexistence_threshold(1.0, 1.0, 2.5)
        assert bound >= 1.378
        for key in (
            "random_min_coupling_quotient",
            "random_min_lambda_quotient",
            "adversarial_min_coupling_quotient",
            "adversarial_min_lambda_quotient",
        ):
            assert res.values[key] >= 1.378, key
        assert res.values["violations"] == 0

    report(
        "06 nonexistence certificate, 1000 random + 10 adversarial",
        lambda: run_nonexistence(random_pairs=1000, adversarial=10),
        300.0,
        verify,
    )


def test_07_coercive_ground_state(report):
    def verify(res):
        assert res.values["energy"] < 0
        assert min(res.values["component_fractions"]) > 1e-4
        assert res.values["gradient_relative"] < 1e-6
        assert res.values["ansatz_energy"] < res.values["I0"]

    report("07 coercive ground state at 48^3", lambda: run_coercive_ground_state(n=48), 600.0, verify)


def test_08_multibump(report):
    def verify(res):
        J = res.values["energies"]
        assert len(J) == 4 and all(b < a for a, b in zip(J, J[1:]))
        assert J[3] < J[0] - 0.5 * abs(res.values["single"])
        assert all(0.5 <= r <= 2.0 for r in res.values["cross_over_point_charge"])

    report("08 multibump energies and point-charge interaction", run_multibump, 300.0, verify)


def test_09_nehari_ground_state(report):
    def verify(res):
        assert res.values["filtration"] == "N1"
        assert res.values["classification"] == "Nminus"
        assert 3.5 > res.values["P_classify"] == pytest.approx((1 + math.sqrt(73)) / 3)
        for key in ("nehari", "pohozaev", "decomposition"):
            assert abs(res.values[key]) < 1e-3, key
        a = res.values["alpha_minus"]
        assert res.values["sandwich_lower"] < a
        assert a < min(res.values["filtration_level"], res.values["single_component_level"])

    report("09 Nehari ground state at 48^3, lower branch", lambda: run_nehari_ground_state(n=48), 900.0, verify)


def test_10_limit_comparison(report):
    def verify(res):
        a, a_inf = res.values["alpha_minus"], res.values["alpha_minus_limit"]
        assert a_inf - a > 1e-3 * abs(a_inf)

    report("10 level below the limit problem's level", run_limit_comparison, 1200.0, verify)


def test_11_symmetry_breaking(report):
    def verify(res):
        K, delta, alpha = res.values["K"], res.values["delta"], res.values["alpha"]
        assert delta >= -K
        assert -K - alpha > 1e-3 * K
        assert res.values["com_displacement_cells"] > 2.0

    report("11 symmetry breaking, displaced minimiser", run_symmetry_breaking, 1800.0, verify)


def test_12_inequalities(report):
    def verify(res):
        for name in ("lions", "coercive", "appendix", "hls"):
            assert res.values[f"{name}_violations"] == 0

    report("12 splitting and quartic inequalities, 200 pairs", lambda: run_inequality_suite(200), 300.0, verify)
