import pytest

from twistedfock.scalar import Q

from twistedfock.verify import (
    SUITES,
    run_suite,
    suite_brackets,
    suite_contraction,
    suite_covariance,
    suite_grading,
    suite_heisenberg,
    suite_jacobi,
    suite_lattice,
    window,
)


@pytest.mark.parametrize("l", [2, 3, 4, 5])
def test_lattice_suite(l):
    rep = suite_lattice(l)
    assert rep["ok"]
    assert rep["antisymmetry_failures"] == []


def test_lattice_suite_literal_gap():
    # single-term runs fall outside the strict i < j range; at l = 2 that is every middle root
    assert suite_lattice(2)["p_map_literal_range_misses"] == 4
    assert suite_lattice(3)["p_map_literal_range_misses"] == 8


def test_window_size():
    assert len(window(2, 3).monomials) == 1520


def test_heisenberg_small():
    rep = suite_heisenberg(2, seed=3, samples=10, pairs=4)
    assert rep["ok"] and rep["checks"] == 40


def test_grading_small():
    rep = suite_grading(2, depth=1, mode_range=1)
    assert rep["ok"] and rep["parity"]["ok"]


def test_contraction_small():
    assert suite_contraction(2, order=2, depth=1)["ok"]


def test_covariance_small():
    assert suite_covariance(2, depth=1, n_range=1, d_range=1)["ok"]


def test_brackets_small():
    rep = suite_brackets(2, depth=1, mode_range=0)
    assert rep["ok"] and rep["closure_failures"] == []
    assert rep["checks"] == len(rep["reports"])


def test_brackets_strict_paper_fails_on_stated_constants():
    rep = suite_brackets(2, depth=1, mode_range=0, strict_paper=True)
    assert rep["stated_mismatches"] > 0 and not rep["ok"]


def test_brackets_jobs_deterministic():
    one = suite_brackets(2, depth=Q(1, 2), mode_range=1)
    two = suite_brackets(2, depth=Q(1, 2), mode_range=1, jobs=2)
    assert one == two


def test_jacobi_small():
    assert suite_jacobi(2, seed=1, count=5, vectors=2)["ok"]


def test_run_suite_dispatch():
    assert run_suite("heisenberg", 2)["suite"] == "heisenberg"
    assert run_suite("cartan", 2, depth=1)["suite"] == "cartan"
    assert set(SUITES) == {"heisenberg", "grading", "contraction", "brackets", "cartan", "jacobi"}


def test_run_suite_unknown():
    with pytest.raises(ValueError):
        run_suite("nope", 2)



