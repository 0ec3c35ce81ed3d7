"""Exit criteria for the package, one test per criterion.

Each test logs a PASS/FAIL line (collected in the terminal summary) before
asserting. Tolerances and runtime bounds are fixed here.
"""
import itertools
import json
import time

import numpy as np
import pytest

from conftest import same_up_to_phase
from quditport.channels import (
    BellLabel,
    GeneralScheme,
    bell_basis,
    bell_state,
    channel_validity,
    clock_shift_family,
    completeness_deviation,
    dual_channel_state,
    gram_deviation,
    rescale_to_trace,
)
from quditport.cli import main
from quditport.jsonio import dumps
from quditport.linalg import random_state, random_unitary
from quditport.observables import (
    number_sum_observable,
    phase_difference_observable,
    weyl_commutator,
)
from quditport.protocol import TeleportRun, recovery_operator, run_teleport

pytestmark = pytest.mark.acceptance


def test_ac1_weyl_identity(acceptance_log):
    start = time.perf_counter()
    worst = 0.0
    for s in (2, 3, 4, 5, 8, 16):
        for k, n in itertools.product(range(s), repeat=2):
            worst = max(worst, abs(weyl_commutator(s, k, n) - np.exp(2j * np.pi * k * n / s)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 5
    acceptance_log("AC1 Weyl identity", ok, f"max residual {worst:.2e} (<1e-10), {elapsed:.2f}s (<5s)")
    assert ok


def test_ac2_bell_orthonormal_complete(acceptance_log):
    start = time.perf_counter()
    gram = comp = 0.0
    for s in range(2, 17):
        basis = bell_basis(s)
        gram = max(gram, gram_deviation(basis))
        comp = max(comp, completeness_deviation(basis))
    elapsed = time.perf_counter() - start
    ok = gram <= 1e-9 and comp <= 1e-9 and elapsed < 10
    acceptance_log("AC2 Bell basis orthonormal+complete", ok,
                   f"gram {gram:.2e}, completeness {comp:.2e} (<=1e-9), {elapsed:.2f}s (<10s)")
    assert ok


def test_ac3_joint_eigenstates(acceptance_log):
    worst = 0.0
    for s in (2, 3, 5):
        pd, ns = phase_difference_observable(s), number_sum_observable(s)
        for k, n in itertools.product(range(s), repeat=2):
            v = bell_state(s, k, n)
            worst = max(worst, np.max(np.abs(pd @ v - 2 * np.pi * k / s * v)), np.max(np.abs(ns @ v - n * v)))
    ok = worst < 1e-10
    acceptance_log("AC3 joint eigenstates", ok, f"max residual {worst:.2e} (<1e-10)")
    assert ok


def test_ac4_perfect_teleportation(acceptance_log):
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    min_f, max_dev = 1.0, 0.0
    for s in (2, 3, 5, 8):
        for _ in range(50):
            channel = BellLabel(s, int(rng.integers(s)), int(rng.integers(s)))
            report = run_teleport(TeleportRun(s, "standard", random_state(s, rng), channel))
            min_f = min(min_f, min(r.fidelity for r in report.records))
            max_dev = max(max_dev, report.max_probability_deviation)
    elapsed = time.perf_counter() - start
    ok = min_f >= 1 - 1e-9 and max_dev <= 1e-9 and elapsed < 30
    acceptance_log("AC4 perfect teleportation", ok,
                   f"min fidelity 1-{1 - min_f:.1e}, max |p-1/s^2| {max_dev:.1e}, {elapsed:.2f}s (<30s)")
    assert ok


def test_ac5_bennett_equivalence(acceptance_log):
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1, -1]).astype(complex)
    targets = {"I": np.eye(2), "X": x, "Z": z, "XZ": x @ z}
    channel = BellLabel(2, 1, 1)
    matched = []
    for k, n in itertools.product(range(2), repeat=2):
        op = recovery_operator(2, channel, BellLabel(2, k, n))
        matched.append(next((name for name, t in targets.items() if same_up_to_phase(op, t)), None))
    ok = sorted(m for m in matched if m) == sorted(targets)
    acceptance_log("AC5 two-level recoveries = {I,X,Z,XZ}", ok, f"outcomes (0,0),(0,1),(1,0),(1,1) -> {matched}")
    assert ok


def test_ac6_dual_scheme(acceptance_log):
    rng = np.random.default_rng(6)
    min_f = 1.0
    for s in (2, 3, 5):
        for _ in range(20):
            channel = BellLabel(s, int(rng.integers(s)), int(rng.integers(s)))
            min_f = min(min_f, run_teleport(TeleportRun(s, "dual", random_state(s, rng), channel)).min_fidelity)
    coincides = any(same_up_to_phase(dual_channel_state(2), bell_state(2, k, n))
                    for k, n in itertools.product(range(2), repeat=2))
    ok = min_f >= 1 - 1e-9 and coincides
    acceptance_log("AC6 dual scheme", ok, f"min fidelity 1-{1 - min_f:.1e}; s=2 channel is a standard Bell state: {coincides}")
    assert ok


def test_ac7_iff_unitary(acceptance_log):
    rng = np.random.default_rng(7)
    # (a) unitary T: perfect with recovery O_kl T^dagger
    min_f = 1.0
    for s in (2, 3, 5):
        for _ in range(50):
            scheme = GeneralScheme(s, random_unitary(s, rng))
            min_f = min(min_f, run_teleport(TeleportRun(s, "general", random_state(s, rng), scheme)).min_fidelity)
    # (b) non-unitary T with Tr(T^dagger T) = s: positive gap, and O_kl U^dagger recovery fails somewhere
    min_gap, all_fail = np.inf, True
    for s in (2, 3, 5):
        for _ in range(50):
            t = rescale_to_trace(rng.standard_normal((s, s)) + 1j * rng.standard_normal((s, s)))
            scheme = GeneralScheme(s, t)
            min_gap = min(min_gap, channel_validity(t).gap)
            worst = min(
                run_teleport(TeleportRun(s, "general", random_state(s, rng), scheme), allow_unreliable=True).min_fidelity
                for _ in range(20)
            )
            all_fail &= worst < 1 - 1e-3
    ok = min_f >= 1 - 1e-9 and min_gap > 0 and all_fail
    acceptance_log("AC7 reliable iff T unitary", ok,
                   f"(a) min fidelity 1-{1 - min_f:.1e}; (b) min gap {min_gap:.3f} > 0, every T loses fidelity: {all_fail}")
    assert ok


def test_ac8_clock_shift_normalization(acceptance_log):
    start = time.perf_counter()
    worst = 0.0
    checks = 0
    for s in range(2, 9):
        fam = clock_shift_family(s)
        for i, a in enumerate(fam):
            for j, b in enumerate(fam):
                worst = max(worst, abs(np.trace(a @ b.conj().T) - s * (i == j)))
                checks += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10
    acceptance_log("AC8 clock-shift trace orthogonality", ok,
                   f"{checks} traces, max deviation {worst:.2e} (<=1e-10), {elapsed:.2f}s (<10s)")
    assert ok


def test_ac9_sampled_statistics(acceptance_log, tmp_path):
    trials = 10_000
    phi = random_state(2, np.random.default_rng(9))
    run = TeleportRun(2, "standard", phi, BellLabel(2, 1, 1), seed=2024)
    report = run_teleport(run, trials=trials)
    bound = 4 * np.sqrt(0.25 * 0.75 / trials)
    worst = max(abs(r.count / trials - 0.25) for r in report.records)
    same_lib = dumps(report.to_dict()) == dumps(run_teleport(run, trials=trials).to_dict())
    paths = [tmp_path / f"r{i}.json" for i in range(2)]
    codes = [main(["teleport", "-d", "2", "--trials", str(trials), "--seed", "2024", "-o", str(p)]) for p in paths]
    same_cli = paths[0].read_bytes() == paths[1].read_bytes()
    freqs = [o["frequency"] for o in json.loads(paths[0].read_text())["outcomes"]]
    cli_ok = max(abs(f - 0.25) for f in freqs) <= bound
    ok = worst <= bound and same_lib and same_cli and cli_ok and codes == [0, 0]
    acceptance_log("AC9 sampled statistics + determinism", ok,
                   f"max |f-1/4| {worst:.4f} (<= {bound:.4f}); byte-identical library {same_lib}, CLI {same_cli}")
    assert ok
