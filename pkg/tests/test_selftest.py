import pytest

from dsem.selftest import FAULTS, run_selftest

EXPECTED = {
    "entropy_nonnegative", "entropy_upper_bound", "reduction_fidelity_bhattacharyya",
    "reduction_relative_entropy_kl", "reduction_outcome_product", "trace_vs_spectral",
    "soft_alignment_maps", "correlation_identity", "bell_state_ree",
}


@pytest.mark.parametrize("seed", [0, 1])
def test_all_checks_pass(seed):
    checks = run_selftest(seed=seed, trials=8)
    assert {c.name for c in checks} == EXPECTED
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_entropy_sign_fault_is_caught():
    failed = {c.name for c in run_selftest(faults=FAULTS, trials=8) if not c.passed}
    assert "entropy_nonnegative" in failed


def test_unknown_fault():
    with pytest.raises(ValueError):
        run_selftest(faults=["gravity"])
