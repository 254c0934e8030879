"""Acceptance criteria 1-11, one test each.

Every test prints a ``[ACCEPT n] PASS|FAIL`` line; the lines are also
repeated in the pytest terminal summary. Run this file directly to get the
same lines without pytest.
"""
import cmath
import json
import math
import time

import numpy as np

from dfma.cli import main as cli_main
from dfma.di import DiSpectrum, class_statistics, compute_di, scatters
from dfma.energy import LayerOps, ann_energy
from dfma.ingest import radial_lowpass
from dfma.lif_sim import LifConfig, closed_form_gain, gain_probe, run
from dfma.lif_spectral import (BETA_MIN_CUTOFF, cutoff, cutoff_arccos, effective_bandwidth,
                               leak_from_beta, quantize_cutoff, template_at)
from dfma.matching import FmsCurve, fms_sweep, select_boundary
from dfma.spectrum import FrequencyGrid, amplitude_spectrum

RESULTS = {}


def report(n, title, ok, detail=""):
    line = f"[ACCEPT {n:2d}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    RESULTS[n] = line
    print(line)
    assert ok, line


def _bisect(f, lo, hi, tol=1e-15):
    flo = f(lo)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def closed_form_h(w, b):
    return (1 - b) ** 2 / (1 + b * b - 2 * b * math.cos(w))


# 1 ---------------------------------------------------------------------------

def test_01_template_closed_form():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    betas = rng.uniform(0.0, 1.0, 1000)
    omegas = rng.uniform(0.0, math.pi, 1000)
    got = template_at(omegas, betas)
    want = np.array([closed_form_h(w, b) for w, b in zip(omegas, betas)])
    rel = float(np.max(np.abs(got - want) / want))
    nyq = max(abs(template_at(math.pi, b) - ((1 - b) / (1 + b)) ** 2) / ((1 - b) / (1 + b)) ** 2
              for b in betas)
    dt = time.perf_counter() - t0
    report(1, "template matches closed form and Nyquist identity",
           rel <= 1e-12 and nyq <= 1e-12 and dt < 1.0,
           f"max rel {rel:.2e}, nyquist rel {nyq:.2e}, {dt:.3f}s")


# 2 ---------------------------------------------------------------------------

def test_02_cutoff_vs_bisection():
    t0 = time.perf_counter()
    worst_acos = worst_main = 0.0
    for b in np.linspace(BETA_MIN_CUTOFF, 0.999, 200):
        root = _bisect(lambda w: closed_form_h(w, b) - 0.5, 0.0, math.pi)
        worst_acos = max(worst_acos, abs(cutoff_arccos(b) - root))
        worst_main = max(worst_main, abs(cutoff(b).cutoff - root))
    saturated_ok = True
    for b in np.linspace(0.0, math.nextafter(BETA_MIN_CUTOFF, 0.0), 50):
        # no sign change of h - 1/2 on (0, pi]: the template stays above one half
        f = lambda w: closed_form_h(w, b) - 0.5
        no_bracket = f(1e-12) > 0 and f(math.pi) > 0
        scan = all(f(w) > 0 for w in np.linspace(1e-9, math.pi, 200))
        bw = cutoff(b)
        saturated_ok &= no_bracket and scan and bw.saturated and bw.b_eff == math.pi
    dt = time.perf_counter() - t0
    report(2, "cutoff equals bisection root, saturation below 3-2*sqrt(2)",
           worst_acos <= 1e-9 and worst_main <= 1e-9 and saturated_ok and dt < 1.0,
           f"acos err {worst_acos:.1e}, half-angle err {worst_main:.1e}, {dt:.3f}s")


# 3 ---------------------------------------------------------------------------

def test_03_monotonicity_suite():
    rng = np.random.default_rng(303)
    slack = 1e-12
    v_omega = v_beta = v_bw = v_fms = 0
    for _ in range(1000):
        b = rng.uniform(0, 1)
        w1, w2 = np.sort(rng.uniform(0, math.pi, 2))
        v_omega += template_at(w2, b) > template_at(w1, b) + slack
        b1, b2 = np.sort(rng.uniform(0, 1, 2))
        w = rng.uniform(0, math.pi)
        v_beta += template_at(w, b2) > template_at(w, b1) + slack
    grid_b = np.linspace(BETA_MIN_CUTOFF, 1.0, 1002)[1:-1]
    bws = np.array([effective_bandwidth(b) for b in grid_b])
    v_bw += int(np.sum(np.diff(bws) >= 0))
    for _ in range(1000):
        K = int(rng.integers(1, 33))
        p = rng.dirichlet(np.ones(K + 1) * rng.uniform(0.1, 2))
        betas = np.sort(rng.choice(np.linspace(0, 0.999, 1000), int(rng.integers(3, 20)), replace=False))
        fms = fms_sweep(DiSpectrum.from_pmf(p), betas).fms
        v_fms += int(np.sum(np.diff(fms) > slack))
    total = v_omega + v_beta + v_bw + v_fms
    report(3, "template/bandwidth/FMS monotonicity over 1000 trials each", total == 0,
           f"violations omega={v_omega} beta={v_beta} B_eff={v_bw} fms={v_fms}")


# 4 ---------------------------------------------------------------------------

def test_04_nearest_bin_bound():
    rng = np.random.default_rng(404)
    bad = 0
    worst = 0.0
    for _ in range(1000):
        b = rng.uniform(BETA_MIN_CUTOFF, 0.999)
        L = int(rng.integers(4, 65))
        g = FrequencyGrid(L)
        bw = cutoff(b)
        k = quantize_cutoff(bw, g)
        d = abs(g.omegas[k] - bw.cutoff)
        worst = max(worst, d * L / math.pi)
        bad += not d <= math.pi / L
    report(4, "nearest-bin error <= pi/L", bad == 0, f"{bad} violations, worst d*L/pi = {worst:.4f}")


# 5 ---------------------------------------------------------------------------

def test_05_di_scale_invariance():
    rng = np.random.default_rng(505)
    eps = 1e-12
    worst = 0.0
    checked = 0
    for _ in range(50):
        C = int(rng.integers(2, 5))
        L = int(rng.integers(4, 33))
        n = int(rng.integers(3, 8))
        scale = 10 ** rng.uniform(-1, 2)
        samples = [scale * rng.standard_normal((L, 1, 2, 2)) + 0.3 * c * np.cos(np.arange(L) * (c + 1)).reshape(L, 1, 1, 1)
                   for c in range(C) for _ in range(n)]
        labels = [c for c in range(C) for _ in range(n)]
        base = compute_di(samples, labels, epsilon=eps)
        # sw >= 1e6 * eps on every bin that carries signal; DC is zero after de-meaning
        stats = class_statistics([amplitude_spectrum(x) for x in samples], labels)
        sw = scatters(stats)[1][1:]
        assert sw.min() >= 1e6 * eps
        checked += 1
        for alpha in (0.1, 10.0, 1000.0):
            other = compute_di([alpha * x for x in samples], labels, epsilon=eps)
            worst = max(worst, float(np.max(np.abs(other.di_norm - base.di_norm))))
    report(5, "di_norm invariant to amplitude rescaling", worst < 1e-6 and checked == 50,
           f"max per-bin shift {worst:.2e}")


# 6 ---------------------------------------------------------------------------

def brute_force_di(samples, labels, eps):
    """Straight-line reimplementation: loops, cmath, no numpy reductions."""
    L = len(samples[0])
    K = L // 2
    amps = []
    for x in samples:
        series = []
        for l in range(L):
            frame = list(np.asarray(x[l], dtype=float).ravel())
            series.append(sum(frame) / len(frame))
        m = sum(series) / L
        series = [s - m for s in series]
        row = []
        for k in range(K + 1):
            acc = 0j
            for l in range(L):
                acc += series[l] * cmath.exp(-2j * math.pi * k * l / L)
            row.append(abs(acc))
        amps.append(row)
    classes = sorted(set(labels))
    N = len(labels)
    di = []
    for k in range(K + 1):
        mus, vars_, pis = [], [], []
        for c in classes:
            vals = [amps[i][k] for i in range(N) if labels[i] == c]
            mu = sum(vals) / len(vals)
            mus.append(mu)
            vars_.append(sum((v - mu) ** 2 for v in vals) / (len(vals) - 1))
            pis.append(len(vals) / N)
        mbar = sum(p * m for p, m in zip(pis, mus))
        sb = sum(p * (m - mbar) ** 2 for p, m in zip(pis, mus))
        sw = sum(p * v for p, v in zip(pis, vars_))
        di.append(sb / (sw + eps))
    total = sum(di)
    return di, [d / total for d in di]


def test_06_di_brute_force_oracle():
    rng = np.random.default_rng(606)
    labels = [c for c in range(3) for _ in range(4)]
    t = np.arange(8)
    samples = [rng.standard_normal((8, 2, 3, 3)) + np.cos(2 * np.pi * (c + 1) * t / 8 + rng.uniform(0, 6)).reshape(8, 1, 1, 1)
               for c in labels]
    got = compute_di(samples, labels)
    di, pmf = brute_force_di(samples, labels, 1e-12)
    di, pmf = np.array(di), np.array(pmf)
    # the DC bin is a structural zero after de-meaning (both sides hold round-off
    # near 1e-20), so it gets an absolute floor far below any meaningful value
    live = pmf > 1e-12
    rel_di = float(np.max(np.abs(got.di[live] - di[live]) / di[live]))
    rel_pmf = float(np.max(np.abs(got.di_norm[live] - pmf[live]) / pmf[live]))
    floor_ok = bool(np.all(np.abs(got.di_norm[~live] - pmf[~live]) <= 1e-15))
    report(6, "DI pipeline equals straight-line oracle (3 classes, 12 samples, L=8)",
           rel_di <= 1e-9 and rel_pmf <= 1e-9 and floor_ok,
           f"max rel di {rel_di:.1e}, di_norm {rel_pmf:.1e}, {int((~live).sum())} structural-zero bin(s)")


# 7 ---------------------------------------------------------------------------

def test_07_worked_example_and_determinism():
    curve = FmsCurve(np.array([0.1, 0.5, 0.9]), np.array([1.0, 0.5, 0.0]))
    runs = [select_boundary(curve).to_json() for _ in range(5)]
    knee = select_boundary(curve)
    ok = (knee.beta_dagger == 0.5 and abs(knee.deviations[1] - 0.2325) <= 1e-4
          and knee.deviations[0] == 0.0 and knee.deviations[2] == 0.0 and len(set(runs)) == 1)
    report(7, "worked 3-candidate example, deterministic output", ok,
           f"beta_dagger={knee.beta_dagger}, d_2={knee.deviations[1]:.6f}")


# 8 ---------------------------------------------------------------------------

def test_08_simulator_spectral_consistency():
    rng = np.random.default_rng(808)
    worst_gain = 0.0
    for _ in range(20):
        L = int(rng.integers(4, 65))
        k = int(rng.integers(1, L // 2 + 1))
        w = 2 * math.pi * k / L
        beta = float(rng.uniform(0.0, 0.95))
        cfg = LifConfig(leak_from_beta(beta), bool(rng.integers(0, 2)), math.inf)
        measured = gain_probe(cfg, w)
        expected = closed_form_gain(beta, cfg.alpha, w)
        worst_gain = max(worst_gain, abs(measured - expected) / expected)
    worst_conv = 0.0
    for _ in range(20):
        T = int(rng.integers(1, 257))
        beta = float(rng.uniform(0.0, 0.99))
        cfg = LifConfig(leak_from_beta(beta), bool(rng.integers(0, 2)), math.inf)
        x = rng.uniform(-1, 1, T)
        u = run(cfg, x).potentials
        for t in range(T):
            want = math.fsum(beta ** (t - s) * cfg.alpha * x[s] for s in range(t + 1))
            worst_conv = max(worst_conv, abs(u[t] - want) / max(abs(want), 1e-300)) if want != 0 else worst_conv
    report(8, "gain probe vs closed form, run() vs convolution oracle",
           worst_gain < 1e-3 and worst_conv <= 1e-9,
           f"gain rel err {worst_gain:.1e}, convolution rel err {worst_conv:.1e}")


# 9 ---------------------------------------------------------------------------

PUBLISHED = [  # name, published #OPs (M), published energy (uJ) low, high
    ("LeNet", 54.58, 251.08, 251.08),
    ("RNN", 1.60, 7.35, 7.36),
    ("GRU", 4.83, 22.20, 22.20),
    ("MLP", 4.33, 19.90, 19.90),
    ("LSTM", 6.42, 29.55, 29.55),
]


def test_09_energy_reproduction():
    t0 = time.perf_counter()
    worst = 0.0
    parts = []
    for name, mops, lo, hi in PUBLISHED:
        e = ann_energy([LayerOps(name, "dense", mops)])
        err = 0.0 if lo <= e <= hi else min(abs(e - lo) / lo, abs(e - hi) / hi)
        worst = max(worst, err)
        parts.append(f"{name} {e:.3f}")
    dt = time.perf_counter() - t0
    report(9, "ANN energy rows from published #OPs within 0.15%", worst <= 0.0015 and dt < 1.0,
           ", ".join(parts) + f"; worst {100 * worst:.3f}%")


# 10 --------------------------------------------------------------------------

def test_10_lowpass_laws():
    rng = np.random.default_rng(1010)
    fails = []
    for i in range(20):
        x = rng.standard_normal((64, 64)) * rng.uniform(0.1, 10) + rng.uniform(-5, 5)
        nu = float(rng.uniform(0.01, 0.7))
        y0 = radial_lowpass(x, 0.0)
        if not np.allclose(y0, x.mean(), atol=1e-9, rtol=0):
            fails.append(f"{i}:dc")
        if np.max(np.abs(radial_lowpass(x, math.sqrt(2) / 2) - x)) > 1e-9:
            fails.append(f"{i}:identity")
        y = radial_lowpass(x, nu)
        if np.max(np.abs(radial_lowpass(y, nu) - y)) > 1e-9:
            fails.append(f"{i}:idempotent")
        if not (np.isrealobj(y) and y.dtype == np.float64):
            fails.append(f"{i}:real")
        if np.sum(np.abs(np.fft.fft2(y)) ** 2) > np.sum(np.abs(np.fft.fft2(x)) ** 2) * (1 + 1e-12):
            fails.append(f"{i}:energy")
    report(10, "radial low-pass: DC-only, identity, idempotent, real, energy", not fails,
           "20 maps" if not fails else ", ".join(fails))


# 11 --------------------------------------------------------------------------

def test_11_end_to_end_smoke(tmp_path):
    t0 = time.perf_counter()
    d = tmp_path
    codes = [
        cli_main(["synth", "--out", str(d / "ds"), "--bins", "1,3", "--L", "16", "--seed", "11", "--quiet"]),
        cli_main(["di", str(d / "ds" / "manifest.json"), "--out", str(d / "di.json"), "--quiet"]),
        cli_main(["fms", str(d / "di.json"), "--out", str(d / "fms.csv"), "--quiet"]),
        cli_main(["select-beta", str(d / "fms.csv"), "--out", str(d / "knee.json"), "--quiet"]),
    ]
    dt = time.perf_counter() - t0
    ok = codes == [0, 0, 0, 0]
    detail = f"exit codes {codes}"
    if ok:
        pmf = np.array(json.loads((d / "di.json").read_text())["di_norm"])
        peaks = sorted(int(k) for k in np.argsort(pmf)[-2:])
        fms = FmsCurve.from_csv((d / "fms.csv").read_text()).fms
        knee = json.loads((d / "knee.json").read_text())
        ok = peaks == [1, 3] and bool(np.all(np.diff(fms) <= 0)) and not knee["degenerate"] and dt < 10
        detail = f"peaks {peaks}, beta_dagger {knee['beta_dagger']}, {dt:.2f}s"
    report(11, "synthetic di -> fms -> select-beta pipeline", ok, detail)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    for name, fn in sorted((n, f) for n, f in globals().items() if n.startswith("test_")):
        try:
            if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as tmp:
                    fn(Path(tmp))
            else:
                fn()
        except AssertionError:
            pass
