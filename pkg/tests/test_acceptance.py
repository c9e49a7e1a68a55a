"""Acceptance suite: every release gate, one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np

from ppsim import quantum
from ppsim.adversaries import StrategyKind, StrategySpec
from ppsim.cli import main
from ppsim.harness import run_session
from ppsim.optics import default_filter
from ppsim.protocols import ProtocolConfig, ProtocolKind

N = 10_000
SEED = 42


@contextmanager
def criterion(name: str):
    try:
        yield
    except Exception:
        print(f"[acceptance] {name}: FAIL")
        raise
    print(f"[acceptance] {name}: PASS")


def session(kind, strategy, rounds=N, **kw):
    if kind is ProtocolKind.KKKP:
        kw.setdefault("control_prob", 0.0)
    cfg = ProtocolConfig(kind=kind, rounds=rounds, seed=SEED, **kw)
    stats, _ = run_session(cfg, strategy)
    return stats


NO_EVE = StrategySpec(StrategyKind.NO_EVE)
IPE = StrategySpec(StrategyKind.IPE)


def test_1_honest_run_correctness():
    with criterion("1 honest-run correctness"):
        for kind in ProtocolKind:
            start = time.perf_counter()
            stats = session(kind, NO_EVE)
            elapsed = time.perf_counter() - start
            assert stats.qber == 0.0, kind
            assert stats.control_failure_rate == 0.0, kind
            assert stats.anomaly_count == 0, kind
            assert elapsed < 5.0, (kind, elapsed)


def test_2_ipe_full_leakage_zero_risk():
    with criterion("2 invisible-probe full leakage at zero risk"):
        for kind in (ProtocolKind.PP_EPR, ProtocolKind.PP_SINGLE):
            stats = session(kind, IPE)
            assert stats.eve_accuracy == 1.0, kind
            assert abs(stats.eve_mutual_info_bits - 1.0) <= 1e-9, kind
            assert stats.qber == 0.0, kind
            assert stats.control_failure_rate == 0.0, kind
            assert stats.anomaly_count == 0, kind
        dense = session(ProtocolKind.PP_DENSE, StrategySpec(StrategyKind.IPE_DENSE))
        assert dense.eve_accuracy == 1.0
        assert abs(dense.eve_mutual_info_bits - 2.0) <= 1e-9
        assert dense.qber == 0.0
        assert dense.anomaly_count == 0


def test_3_filter_defense():
    with criterion("3 narrowband filter neutralizes the probe"):
        stats = session(ProtocolKind.PP_EPR, IPE, filter=default_filter())
        assert abs(stats.eve_accuracy - 0.5) <= 0.021
        assert stats.eve_mutual_info_bits < 0.01
        assert stats.qber == 0.0
        assert stats.absorbed_total == N  # one probe absorbed per round


def test_4_visible_probe_detection():
    with criterion("4 in-band probe trips the detector"):
        stats = session(ProtocolKind.PP_EPR, StrategySpec(StrategyKind.IPE, lambda_e_nm=800.0))
        assert stats.anomaly_count > 0
        # every control round should see both photons
        controls = stats.rounds - stats.message_rounds
        assert stats.anomaly_count == controls


def test_5_intercept_resend_baseline():
    with criterion("5 intercept-resend baseline: clean checks, scrambled messages"):
        stats = session(ProtocolKind.PP_EPR, StrategySpec(StrategyKind.INTERCEPT_RESEND, basis="z"))
        assert stats.control_failure_rate == 0.0
        assert abs(stats.qber - 0.5) <= 0.021


def test_6_blind_rotation_blindness():
    with criterion("6 blind rotations nullify the probe"):
        start = time.perf_counter()
        for n in (1, 4, 16):
            stats = session(
                ProtocolKind.KKKP, StrategySpec(StrategyKind.KKKP_PROBE, n=n), rounds=100_000
            )
            assert stats.eve_mutual_info_bits < 0.01, n
        known = session(
            ProtocolKind.KKKP,
            StrategySpec(StrategyKind.KKKP_PROBE, n=1, theta_known=True),
            rounds=100_000,
        )
        assert known.eve_accuracy == 1.0
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, elapsed


def test_7_quantum_core_properties():
    with criterion("7 quantum-core properties"):
        # unitarity of the gate catalog
        for u in [quantum.I2, quantum.X, quantum.Z, quantum.ZX, quantum.IY] + [
            quantum.rot(t) for t in np.linspace(0, 2 * math.pi, 17)
        ]:
            assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-12

        # normalization after 10^3 random operation sequences
        rng = np.random.default_rng(SEED)
        for _ in range(1000):
            n = int(rng.integers(1, 5))
            amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
            reg = quantum.QuantumRegister(amps / np.linalg.norm(amps), n)
            for _ in range(int(rng.integers(1, 6))):
                qubit = int(rng.integers(0, n))
                choice = int(rng.integers(0, 3))
                if choice == 0:
                    quantum.apply_unitary(reg, qubit, quantum.rot(float(rng.uniform(0, 7))))
                elif choice == 1:
                    quantum.measure(reg, qubit, quantum.BASIS_X, rng)
                elif n >= 2:
                    quantum.measure_bell(reg, qubit, (qubit + 1) % n, rng)
            assert abs(reg.norm() - 1.0) <= 1e-10

        # Born-rule frequencies for Z on |+> at 10^5 samples
        samples = 100_000
        ones = sum(
            quantum.measure(quantum.make_single(quantum.Prep.PLUS), 0, quantum.BASIS_Z, rng)[0]
            for _ in range(samples)
        )
        assert abs(ones / samples - 0.5) <= 3 * math.sqrt(0.25 / samples)

        # dense-coding Bell map, deterministically
        expected = [
            quantum.BellKind.PSI_PLUS, quantum.BellKind.PHI_PLUS,
            quantum.BellKind.PSI_MINUS, quantum.BellKind.PHI_MINUS,
        ]
        for value, unitary in enumerate([quantum.I2, quantum.X, quantum.Z, quantum.ZX]):
            for _ in range(25):
                reg = quantum.make_bell(quantum.BellKind.PSI_PLUS)
                quantum.apply_unitary(reg, 1, unitary)
                outcome, _ = quantum.measure_bell(reg, 0, 1, rng)
                assert outcome is expected[value]


def test_8_determinism(tmp_path):
    with criterion("8 determinism: reruns and parallel runs agree"):
        scenario = tmp_path / "scenario.json"
        scenario.write_text(json.dumps({
            "protocol": "pp_epr",
            "rounds": 4000,
            "attack": {"kind": "ipe", "lambda_e_nm": 190000.0},
            "seed": SEED,
        }), encoding="utf-8")
        out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
        assert main(["run", str(scenario), "-o", str(out1)]) == 0
        assert main(["run", str(scenario), "-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

        sweep1, sweep2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        args = ["sweep", str(scenario), "--field", "lambda_e_nm",
                "--values", "800,190000", "--rounds", "1000"]
        assert main(args + ["-o", str(sweep1)]) == 0
        assert main(args + ["-o", str(sweep2)]) == 0
        assert sweep1.read_bytes() == sweep2.read_bytes()

        cfg = ProtocolConfig(
            kind=ProtocolKind.PP_DENSE, rounds=3000, seed=SEED, log_rounds=True
        )
        spec = StrategySpec(StrategyKind.IPE_DENSE)
        seq_stats, seq_log = run_session(cfg, spec, workers=1)
        par_stats, par_log = run_session(cfg, spec, workers=4)
        assert par_stats == seq_stats
        assert par_log == seq_log
