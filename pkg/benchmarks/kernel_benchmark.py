#!/usr/bin/env python3
"""Compiled-vs-python backend benchmark.

Times the low-level gate kernels on batched statevectors and two
end-to-end workloads (a gradient step through the adjoint engine and a
reference-path batch evaluation). The kernel micro-benchmarks import
both backends directly; the workload benchmarks re-launch the
interpreter with PQCFOURIER_BACKEND set so each run selects its backend
at import time, exactly as a user process would.

Usage:
    python3 benchmarks/kernel_benchmark.py [--rows 512] [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from pqcfourier import _kernels_py

try:
    from pqcfourier import _kernels
except ImportError:
    _kernels = None


# ---------------------------------------------------------------------------
# Kernel micro-benchmarks
# ---------------------------------------------------------------------------

def _random_states(rng, rows: int, n_qubits: int) -> np.ndarray:
    state = rng.standard_normal((rows, 2 ** n_qubits)) * 1j
    state += rng.standard_normal((rows, 2 ** n_qubits))
    state /= np.linalg.norm(state, axis=1, keepdims=True)
    return state


def _time_call(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def kernel_benchmarks(rows: int, repeat: int) -> None:
    rng = np.random.default_rng(0)
    u = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    print(f"kernel micro-benchmarks ({rows} batched states, best of {repeat})")
    print(f"{'kernel':<16} {'qubits':>6} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for n_qubits in (4, 8, 12):
        base = _random_states(rng, rows, n_qubits)
        angles = rng.uniform(-np.pi, np.pi, rows)
        cases = (
            ("apply_1q", lambda k, s: k.apply_1q(s, n_qubits // 2, u)),
            ("apply_1q_angles", lambda k, s: k.apply_1q_angles(s, n_qubits // 2, 0, angles)),
            ("apply_cnot", lambda k, s: k.apply_cnot(s, 0, n_qubits - 1)),
            ("expect_z", lambda k, s: k.expect_z(s, n_qubits // 2)),
        )
        for name, call in cases:
            timings = {}
            for label, mod in (("python", _kernels_py), ("compiled", _kernels)):
                if mod is None:
                    timings[label] = None
                    continue
                state = base.copy()
                timings[label] = _time_call(lambda: call(mod, state), repeat)
            py, cy = timings["python"], timings["compiled"]
            speed = f"{py / cy:7.1f}x" if cy else "     n/a"
            cy_text = f"{cy * 1e6:10.0f}us" if cy else "       n/a"
            print(f"{name:<16} {n_qubits:>6} {py * 1e6:10.0f}us {cy_text} {speed}")


# ---------------------------------------------------------------------------
# End-to-end workloads (subprocess per backend)
# ---------------------------------------------------------------------------

_ENGINE_WORKLOAD = """
import time
import numpy as np
from pqcfourier import ModelConfig, ModelEngine, backend_name, build_circuit
from pqcfourier import grid_dataset, target_2d

assert backend_name() == {backend!r}
circuit = build_circuit(ModelConfig("serial", ((10.0, 20.0), (10.0, 20.0)), ((0, 1),), 13))
dataset = grid_dataset(target_2d(), 30).with_split(42)
engine = ModelEngine(circuit, dataset.train.inputs)
theta = np.random.default_rng(1).uniform(-np.pi, np.pi, circuit.n_params)
weights = np.full(dataset.train.n_rows, 1.0 / dataset.train.n_rows)
engine.forward(theta)  # warm up caches before timing
start = time.perf_counter()
for _ in range({steps}):
    engine.forward(theta)
    engine.backward(weights)
print(f"{{(time.perf_counter() - start) / {steps}:.4f}}")
"""

_REFERENCE_WORKLOAD = """
import time
import numpy as np
from pqcfourier import ModelConfig, backend_name, build_circuit
from pqcfourier import gradient_batch, grid_dataset, model_output_batch, target_2d

assert backend_name() == {backend!r}
circuit = build_circuit(ModelConfig("serial", ((10.0, 20.0), (10.0, 20.0)), ((0, 1),), 13))
dataset = grid_dataset(target_2d(), 30).with_split(42)
rows = dataset.train.inputs
theta = np.random.default_rng(1).uniform(-np.pi, np.pi, circuit.n_params)
weights = np.full(rows.shape[0], 1.0 / rows.shape[0])
start = time.perf_counter()
for _ in range({steps}):
    model_output_batch(circuit, rows, theta)
    gradient_batch(circuit, rows, theta, weights=weights)
print(f"{{(time.perf_counter() - start) / {steps}:.4f}}")
"""


def workload_benchmarks(repeat: int) -> None:
    print()
    print("gradient-step workloads (serial 2D circuit, 720 train rows, s/step)")
    print(f"{'workload':<24} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, template, steps in (
        ("model engine", _ENGINE_WORKLOAD, 10),
        ("reference batch", _REFERENCE_WORKLOAD, 2),
    ):
        timings = {}
        for backend in ("python", "compiled"):
            if backend == "compiled" and _kernels is None:
                timings[backend] = None
                continue
            code = template.format(backend=backend, steps=steps)
            env = dict(os.environ, PQCFOURIER_BACKEND=backend)
            best = float("inf")
            for _ in range(max(1, repeat // 2)):
                out = subprocess.run(
                    [sys.executable, "-c", code], env=env,
                    capture_output=True, text=True, check=True,
                )
                best = min(best, float(out.stdout.strip()))
            timings[backend] = best
        py, cy = timings["python"], timings["compiled"]
        speed = f"{py / cy:7.1f}x" if cy else "     n/a"
        cy_text = f"{cy:9.4f}s" if cy else "      n/a"
        print(f"{label:<24} {py:9.4f}s {cy_text} {speed}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=512, help="batched states per call")
    parser.add_argument("--repeat", type=int, default=5, help="timing repeats, best kept")
    args = parser.parse_args()
    if _kernels is None:
        print("compiled extension not built; timing the python backend only")
    kernel_benchmarks(args.rows, args.repeat)
    workload_benchmarks(args.repeat)


if __name__ == "__main__":
    main()
