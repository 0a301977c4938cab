"""Tests for the binary reformulation and the two local samplers."""

from __future__ import annotations

import numpy as np
import pytest

import spinbeam.qubo as qubo
from spinbeam.model import SpinVector, enumerate_spins
from spinbeam.qubo import (
    ExactSampler,
    QuboInstance,
    Sample,
    SampleSet,
    SamplerConfig,
    SaSampler,
    binary_to_spin,
    build_qubo_from_gram,
    check_sample_energies,
    energy_to_spin_objective,
    solve_exact,
    solve_sa,
    spin_objective_to_energy,
    spin_to_binary,
)


def all_binary_states(n):
    """All 2^n bit rows in lexicographic (= numeric index) order."""
    shifts = np.arange(n - 1, -1, -1)
    return ((np.arange(1 << n)[:, None] >> shifts) & 1).astype(np.float64)


def energy_oracle(coeffs, bits):
    return float(bits @ coeffs @ bits)


def random_rank1_gram(n, seed):
    rng = np.random.Generator(np.random.Philox(key=seed))
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    return np.outer(a, a.conj()).real


def test_energy_oracle_hand_case():
    # b^T M b with M=[[1,-1],[-1,1]]: (1,1) gives 1-1-1+1=0, (1,0) gives 1
    m = np.array([[1.0, -1.0], [-1.0, 1.0]])
    assert energy_oracle(m, np.array([1.0, 1.0])) == 0.0
    assert energy_oracle(m, np.array([1.0, 0.0])) == 1.0
    assert energy_oracle(m, np.array([0.0, 0.0])) == 0.0


def test_spin_binary_round_trip():
    f = SpinVector(np.array([1, -1, -1, 1], dtype=np.int8))
    b = spin_to_binary(f)
    assert b.dtype == np.uint8
    assert np.array_equal(b, [1, 0, 0, 1])
    assert np.array_equal(binary_to_spin(b).spins, f.spins)


def test_binary_to_spin_rejects_non_bits():
    with pytest.raises(ValueError):
        binary_to_spin(np.array([0, 2]))
    with pytest.raises(ValueError):
        binary_to_spin(np.array([[0, 1]]))


def test_build_scalar_gram_degenerates_to_zero():
    inst = build_qubo_from_gram(np.array([[1.0]]))
    assert inst.coeffs.shape == (1, 1)
    assert inst.coeffs[0, 0] == 0.0
    assert inst.scale == 1.0
    assert inst.offset == 1.0
    ss = solve_exact(inst)
    assert [s.energy for s in ss.samples] == [0.0, 0.0]
    # degenerate tie resolves to the lexicographically smaller state b = 0
    assert ss.best.bits.tolist() == [0]


def test_build_all_ones_gram():
    inst = build_qubo_from_gram(np.ones((2, 2)))
    assert inst.scale == 4.0
    assert inst.offset == 4.0
    assert np.array_equal(inst.coeffs, [[1.0, -1.0], [-1.0, 1.0]])
    ss = solve_exact(inst)
    assert [s.bits.tolist() for s in ss.samples[:2]] == [[0, 0], [1, 1]]
    assert [s.energy for s in ss.samples] == [0.0, 0.0, 1.0, 1.0]


def test_build_rejects_asymmetric_gram():
    with pytest.raises(ValueError, match="symmetric"):
        build_qubo_from_gram(np.array([[1.0, 0.5], [0.0, 1.0]]))
    # asymmetry below the gate is symmetrized away
    q = np.array([[1.0, 0.5 + 1e-12], [0.5, 1.0]])
    inst = build_qubo_from_gram(q)
    assert np.abs(inst.coeffs - inst.coeffs.T).max() == 0.0


def test_build_rejects_non_square():
    with pytest.raises(ValueError, match="square"):
        build_qubo_from_gram(np.ones((2, 3)))


@pytest.mark.parametrize("n,seed", [(3, 10), (5, 11), (8, 12), (10, 13)])
def test_spin_objective_reconstruction(n, seed):
    """offset - scale * energy reproduces f^T q f for every state."""
    q = random_rank1_gram(n, seed)
    inst = build_qubo_from_gram(q)
    for f_row in enumerate_spins(n, fix_first=False):
        f = f_row.astype(np.float64)
        direct = float(f @ q @ f)
        b = spin_to_binary(SpinVector(f_row)).astype(np.float64)
        via_energy = energy_to_spin_objective(inst, energy_oracle(inst.coeffs, b))
        assert via_energy == pytest.approx(direct, abs=1e-9 * max(1.0, abs(direct)))
        back = spin_objective_to_energy(inst, via_energy)
        assert back == pytest.approx(energy_oracle(inst.coeffs, b), abs=1e-9)


@pytest.mark.parametrize("n,seed", [(4, 20), (6, 21), (9, 22)])
def test_argmax_sets_preserved_by_reformulation(n, seed):
    """Spin maximizers map exactly onto binary minimizers, and vice versa."""
    q = random_rank1_gram(n, seed)
    inst = build_qubo_from_gram(q)
    spins = enumerate_spins(n, fix_first=False).astype(np.float64)
    objs = np.einsum("bi,bi->b", spins @ q, spins)
    bits = (spins + 1.0) / 2.0
    energies = np.einsum("bi,bi->b", bits @ inst.coeffs, bits)

    band = 1e-9 * max(1.0, np.abs(objs).max())
    argmax = set(np.flatnonzero(objs >= objs.max() - band).tolist())
    argmin = set(np.flatnonzero(energies <= energies.min() + band / inst.scale).tolist())
    assert argmax == argmin


@pytest.mark.parametrize("n,seed", [(4, 30), (7, 31)])
def test_energy_order_mirrors_objective_order(n, seed):
    q = random_rank1_gram(n, seed)
    inst = build_qubo_from_gram(q)
    spins = enumerate_spins(n, fix_first=False).astype(np.float64)
    objs = np.einsum("bi,bi->b", spins @ q, spins)
    bits = (spins + 1.0) / 2.0
    energies = np.einsum("bi,bi->b", bits @ inst.coeffs, bits)
    order = np.argsort(energies, kind="stable")
    slack = 1e-9 * max(1.0, np.abs(objs).max())
    assert np.all(np.diff(objs[order]) <= slack)


def test_calibration_is_neutral():
    """Dividing by the max-norm must not move the minimizing set."""
    q = random_rank1_gram(6, 40)
    inst = build_qubo_from_gram(q)
    q0 = 4.0 * q - 4.0 * np.diag(q @ np.ones(6))
    bits = all_binary_states(6)
    raw = np.einsum("bi,bi->b", bits @ (-q0), bits)
    cal = np.einsum("bi,bi->b", bits @ inst.coeffs, bits)
    band = 1e-9 * max(1.0, np.abs(raw).max())
    assert set(np.flatnonzero(raw <= raw.min() + band).tolist()) == set(
        np.flatnonzero(cal <= cal.min() + band / inst.scale).tolist()
    )
    assert np.abs(inst.coeffs).max() == 1.0


def test_instance_validation():
    with pytest.raises(ValueError, match="symmetric"):
        QuboInstance(coeffs=np.array([[0.0, 1.0], [0.5, 0.0]]), scale=1.0)
    with pytest.raises(ValueError, match=r"\[-1, \+1\]"):
        QuboInstance(coeffs=np.array([[2.0]]), scale=1.0)
    with pytest.raises(ValueError, match="scale"):
        QuboInstance(coeffs=np.zeros((1, 1)), scale=0.0)
    with pytest.raises(ValueError, match="sense"):
        QuboInstance(coeffs=np.zeros((1, 1)), scale=1.0, sense="max")


def test_sampler_config_validation():
    with pytest.raises(ValueError, match="num_reads"):
        SamplerConfig(num_reads=0)
    with pytest.raises(ValueError, match="sa_sweeps"):
        SamplerConfig(sa_sweeps=0)
    with pytest.raises(ValueError, match="sa_beta_range"):
        SamplerConfig(sa_beta_range=(10.0, 0.1))


def test_sample_set_validation():
    s0 = Sample(bits=np.array([0]), energy=0.0, occurrences=2)
    s1 = Sample(bits=np.array([1]), energy=1.0, occurrences=1)
    SampleSet(samples=(s0, s1), total_reads=3)
    with pytest.raises(ValueError, match="total_reads"):
        SampleSet(samples=(s0, s1), total_reads=4)
    with pytest.raises(ValueError, match="sorted"):
        SampleSet(samples=(s1, s0), total_reads=3)
    with pytest.raises(ValueError, match="occurrences"):
        Sample(bits=np.array([0]), energy=0.0, occurrences=0)


def test_solve_exact_two_variable_example():
    inst = QuboInstance(coeffs=np.array([[1.0, -1.0], [-1.0, 1.0]]), scale=1.0)
    ss = solve_exact(inst)
    assert ss.total_reads == 4
    assert all(s.occurrences == 1 for s in ss.samples)
    assert [s.bits.tolist() for s in ss.samples] == [[0, 0], [1, 1], [0, 1], [1, 0]]
    assert [s.energy for s in ss.samples] == [0.0, 0.0, 1.0, 1.0]


def test_solve_exact_matches_full_sort_oracle():
    rng = np.random.Generator(np.random.Philox(key=50))
    a = rng.normal(size=(6, 6))
    m = (a + a.T) / 2
    m /= np.abs(m).max()
    inst = QuboInstance(coeffs=m, scale=1.0)

    bits = all_binary_states(6)
    energies = np.einsum("bi,bi->b", bits @ m, bits)
    order = np.lexsort((np.arange(64), energies))

    full = solve_exact(inst, keep=None)
    assert full.total_reads == 64
    for s, o in zip(full.samples, order):
        assert np.array_equal(s.bits, bits[o].astype(np.uint8))
        assert s.energy == pytest.approx(energies[o], abs=1e-12)

    top5 = solve_exact(inst, keep=5)
    assert len(top5.samples) == 5
    for s, ref in zip(top5.samples, full.samples[:5]):
        assert np.array_equal(s.bits, ref.bits)
        assert s.energy == ref.energy


def test_solve_exact_chunked_merge(monkeypatch):
    # tiny chunks exercise the truncated-merge path across boundaries
    monkeypatch.setattr(qubo, "_EXACT_CHUNK", 4)
    q = random_rank1_gram(6, 51)
    inst = build_qubo_from_gram(q)
    chunked = solve_exact(inst, keep=7)
    monkeypatch.setattr(qubo, "_EXACT_CHUNK", 2**16)
    reference = solve_exact(inst, keep=7)
    assert len(chunked.samples) == 7
    for a, b in zip(chunked.samples, reference.samples):
        assert np.array_equal(a.bits, b.bits)
        assert a.energy == b.energy


def test_solve_exact_guards():
    inst = QuboInstance(coeffs=np.zeros((25, 25)), scale=1.0)
    with pytest.raises(ValueError, match="n <= 24"):
        solve_exact(inst)
    small = QuboInstance(coeffs=np.zeros((2, 2)), scale=1.0)
    with pytest.raises(ValueError, match="keep"):
        solve_exact(small, keep=0)


def test_solve_exact_single_zero_variable():
    inst = QuboInstance(coeffs=np.zeros((1, 1)), scale=1.0)
    ss = solve_exact(inst)
    assert [s.bits.tolist() for s in ss.samples] == [[0], [1]]
    assert [s.energy for s in ss.samples] == [0.0, 0.0]


def test_solve_sa_zero_matrix_is_valid():
    inst = QuboInstance(coeffs=np.zeros((3, 3)), scale=1.0)
    cfg = SamplerConfig(num_reads=64, seed=7)
    ss = solve_sa(inst, cfg)
    assert ss.total_reads == 64
    assert sum(s.occurrences for s in ss.samples) == 64
    assert all(s.energy == 0.0 for s in ss.samples)
    keys = [s.bits.tobytes() for s in ss.samples]
    assert keys == sorted(keys)


@pytest.mark.parametrize("seed", [60, 61, 62])
def test_solve_sa_finds_rank1_optimum(seed):
    q = random_rank1_gram(8, seed)
    inst = build_qubo_from_gram(q)
    best_sa = solve_sa(inst, SamplerConfig(num_reads=1000, seed=seed)).best
    best_exact = solve_exact(inst).best
    assert best_sa.energy == pytest.approx(best_exact.energy, abs=1e-9)


def test_solve_sa_deterministic_given_seed():
    inst = build_qubo_from_gram(random_rank1_gram(6, 70))
    cfg = SamplerConfig(num_reads=200, seed=123)
    a = solve_sa(inst, cfg)
    b = solve_sa(inst, cfg)
    assert len(a.samples) == len(b.samples)
    for sa, sb in zip(a.samples, b.samples):
        assert np.array_equal(sa.bits, sb.bits)
        assert sa.energy == sb.energy
        assert sa.occurrences == sb.occurrences
    c = solve_sa(inst, SamplerConfig(num_reads=200, seed=124))
    assert [s.occurrences for s in a.samples] != [s.occurrences for s in c.samples]


def test_solve_sa_histogram_normalizes():
    inst = build_qubo_from_gram(random_rank1_gram(8, 71))
    ss = solve_sa(inst, SamplerConfig(num_reads=1000, seed=71))
    probs = [s.occurrences / ss.total_reads for s in ss.samples]
    assert sum(probs) == pytest.approx(1.0, abs=1e-9)


def test_solve_sa_smoke_success_rate():
    # small-scale version of the annealer quality gate (full run lives in
    # the acceptance suite at n=10 over 100 instances)
    hits = 0
    for seed in range(20):
        inst = build_qubo_from_gram(random_rank1_gram(6, 300 + seed))
        best_sa = solve_sa(inst, SamplerConfig(num_reads=200, seed=seed)).best
        best_exact = solve_exact(inst).best
        hits += abs(best_sa.energy - best_exact.energy) <= 1e-9
    assert hits == 20


def test_reported_energies_match_recomputation():
    inst = build_qubo_from_gram(random_rank1_gram(7, 80))
    check_sample_energies(inst, solve_exact(inst), atol=1e-9)
    check_sample_energies(inst, solve_sa(inst, SamplerConfig(num_reads=300, seed=80)), atol=1e-9)
    bad = SampleSet(
        samples=(Sample(bits=np.array([1] * 7), energy=42.0, occurrences=1),),
        total_reads=1,
    )
    with pytest.raises(ValueError, match="disagrees"):
        check_sample_energies(inst, bad, atol=1e-9)


def test_sampler_facades_share_call_shape():
    inst = build_qubo_from_gram(random_rank1_gram(5, 90))
    cfg = SamplerConfig(num_reads=100, seed=90)
    exact = ExactSampler().sample(inst, cfg)
    annealed = SaSampler().sample(inst, cfg)
    assert exact.best.energy <= annealed.best.energy + 1e-9
    again = SaSampler().sample(inst, cfg)
    assert np.array_equal(annealed.best.bits, again.best.bits)


def test_exact_sampler_keep_override():
    inst = build_qubo_from_gram(random_rank1_gram(6, 91))
    cfg = SamplerConfig()
    assert len(ExactSampler(keep=3).sample(inst, cfg).samples) == 3
    assert len(ExactSampler(keep=None).sample(inst, cfg).samples) == 64
