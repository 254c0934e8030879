"""``dfma`` command-line front end.

Each subcommand writes its main product (JSON, CSV or a tensor file) to
``--out`` or, for text products, to stdout. A short human summary goes to
stdout when ``--out`` is used and to stderr otherwise; ``--quiet`` drops it.

Exit codes: 0 ok, 2 usage or parameter error, 3 data or format error,
4 domain error (for example a dataset with no discriminative bin).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .di import DiSpectrum, class_statistics, compare_pmfs, di_spectrum
from .energy import EnergyConstants, estimate, parse_architecture
from .errors import DataError, DomainError, FormatError, ParameterError
from .ingest import lowpass, pointcloud, tensorfile
from .ingest.manifest import (DatasetManifest, SampleEntry, load_manifest,
                              stratified_split)
from .lif_sim import (DEFAULT_FLAG_EPS, DEFAULT_GAMMA_MAX, DEFAULT_GAMMA_MIN,
                      DEFAULT_KAPPA, LifConfig, run, validity_flag)
from .lif_spectral import cutoff, sample_template, with_bin
from .matching import (DEFAULT_UNDER_THRESHOLD, FmsCurve, classify_regime,
                       fms_avg, select_boundary, validate_betas)
from .spectrum import FrequencyGrid, PREPROC_MODES, REDUCTIONS, WINDOWS, amplitude_spectrum
from .synthetic import tone_dataset

EXIT_OK, EXIT_PARAM, EXIT_DATA, EXIT_DOMAIN = 0, 2, 3, 4
DEFAULT_BETAS = "0.05:0.95:0.05"


# ---------------------------------------------------------------- helpers

def parse_betas(text: str) -> np.ndarray:
    """``start:stop:step`` (both ends included when step divides the range) or a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            if not step > 0 or stop < start:
                raise ParameterError(f"bad beta range {text!r}: need step > 0 and stop >= start")
            n = int(math.floor((stop - start) / step + 1e-9))
            values = [round(start + i * step, 12) for i in range(n + 1)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse beta candidates {text!r}; use start:stop:step or a,b,c") from None
    return validate_betas(values)


def thread_count() -> int:
    raw = os.environ.get("DFMA_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(f"DFMA_THREADS must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise ParameterError(f"DFMA_THREADS must be a non-negative integer, got {raw!r}")
    return n or min(32, os.cpu_count() or 1)


def pmap(fn, items):
    """Order-preserving map over a pool capped by ``DFMA_THREADS``."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def write_atomic(path, data) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Output:
    def __init__(self, args):
        self.out = args.out
        self.quiet = args.quiet

    def product(self, text: str) -> None:
        if self.out:
            write_atomic(self.out, text)
        else:
            sys.stdout.write(text)

    def note(self, text: str) -> None:
        if self.quiet:
            return
        stream = sys.stdout if self.out else sys.stderr
        stream.write(text if text.endswith("\n") else text + "\n")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc


def read_text(path) -> str:
    with open(path) as fh:
        return fh.read()


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _positive_int(name, value):
    if value is None or value < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    return value


# ---------------------------------------------------------------- commands

def cmd_di(args, out: Output) -> None:
    if not args.epsilon > 0:
        raise ParameterError("--epsilon must be positive")
    manifest = load_manifest(args.manifest)
    samples, labels = manifest.training_set(args.split)
    grid = FrequencyGrid(np.shape(samples[0])[0])
    spectra = pmap(lambda x: amplitude_spectrum(x, grid, args.reduce, args.preproc, args.window), samples)
    di = di_spectrum(class_statistics(spectra, labels), args.epsilon)
    out.product(di.to_json())
    top = np.argsort(-di.di_norm, kind="stable")[:3]
    out.note("top bins: " + ", ".join(f"k={int(k)} ({di.di_norm[k]:.4f})" for k in top))


def cmd_template(args, out: Output) -> None:
    grid = FrequencyGrid(args.L)
    out.product(sample_template(grid, args.beta).to_csv())
    out.note(f"template for beta={args.beta!r} on {grid.K + 1} bins")


def cmd_fms(args, out: Output) -> None:
    betas = parse_betas(args.betas)
    di = DiSpectrum.from_json(read_text(args.di_json))
    curve = FmsCurve(betas, np.array(pmap(lambda b: fms_avg(di, b), betas)))
    out.product(curve.to_csv())
    out.note(f"{len(betas)} candidates, fms {curve.fms[0]:.4f} -> {curve.fms[-1]:.4f}")


def cmd_select_beta(args, out: Output) -> None:
    curve = FmsCurve.from_csv(read_text(args.fms_csv))
    knee = select_boundary(curve)
    out.product(knee.to_json())
    lines = [f"beta_dagger = {knee.beta_dagger!r}  tau_dagger = {knee.tau_dagger!r}"
             + ("  (degenerate curve)" if knee.degenerate else "")]
    lines.append(f"{'beta':>8}  {'fms':>8}  {'d':>8}  regime")
    for b, f, d in zip(curve.betas, curve.fms, knee.deviations):
        regime = classify_regime(float(b), knee.beta_dagger, args.under_threshold).value
        lines.append(f"{b:8.4f}  {f:8.4f}  {d:8.4f}  {regime}")
    out.note("\n".join(lines))


def cmd_bandwidth(args, out: Output) -> None:
    bw = cutoff(args.beta)
    if args.L is not None:
        bw = with_bin(bw, FrequencyGrid(args.L))
    out.product(dumps(bw.to_dict()))
    msg = "saturated, B_eff=pi" if bw.saturated else f"omega_c = {bw.cutoff:.6f}"
    if bw.quantized_bin is not None:
        msg += f", bin {bw.quantized_bin}"
    out.note(msg)


def read_series(path) -> np.ndarray:
    """One value per line; a non-numeric first row is a header and column ``I`` is used if present."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise FormatError(f"{path}: no input values")
    col = 0
    try:
        float(rows[0][0])
    except ValueError:
        header = [h.strip() for h in rows.pop(0)]
        col = header.index("I") if "I" in header else 0
    try:
        return np.array([float(r[col]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: bad input row ({exc})") from exc


def cmd_simulate(args, out: Output) -> None:
    doc = read_json(args.config)
    if not isinstance(doc, dict):
        raise FormatError("LIF config must be a JSON object")
    config = LifConfig.from_dict(doc)
    if args.T is not None:
        _positive_int("--T", args.T)
    trace = run(config, read_series(args.inputs), args.T, args.u0)
    out.product(trace.to_csv())
    out.note(f"{trace.T} steps, {int(trace.spikes.sum())} spikes, rate {trace.spikes.mean():.4f}")


def cmd_validity(args, out: Output) -> None:
    doc = read_json(args.rates)
    if not isinstance(doc, dict):
        raise FormatError("rates must map layer names to {beta: rate} objects")
    try:
        rates = {str(layer): {float(b): float(g) for b, g in by_beta.items()}
                 for layer, by_beta in doc.items()}
    except (AttributeError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed rates document ({exc})") from exc
    report = validity_flag(rates, args.gamma_min, args.gamma_max, args.kappa, args.eps)
    out.product(report.to_json())
    flagged = [n for n, d in report.layers.items() if d.flagged]
    out.note("flagged layers: " + ", ".join(flagged) if flagged else "no layer flagged")


def cmd_energy(args, out: Output) -> None:
    constants = EnergyConstants(args.e_mac, args.e_ac)
    report = estimate(parse_architecture(read_json(args.arch)), constants)
    out.product(report.to_table() if args.table else report.to_json())
    if not args.table:
        out.note(report.to_table().rstrip("\n"))


def _read_recordings(raw_dir: Path):
    if not raw_dir.is_dir():
        raise FormatError(f"{raw_dir} is not a directory")
    classes = sorted(p.name for p in raw_dir.iterdir() if p.is_dir())
    if not classes:
        raise FormatError(f"{raw_dir} has no class sub-directories")
    recs = []
    for c in classes:
        for f in sorted((raw_dir / c).glob("*.csv")):
            recs.append((c, f))
    if not recs:
        raise FormatError(f"{raw_dir} contains no recordings")
    return classes, recs


def _write_dataset(out_dir: Path, classes, tensors, labels, splits, stem_of, norm_stats,
                   normalize_flag) -> DatasetManifest:
    entries = []
    for x, y, s, stem in zip(tensors, labels, splits, stem_of):
        rel = f"{s}/{y}/{stem}.dfma"
        (out_dir / rel).parent.mkdir(parents=True, exist_ok=True)
        tensorfile.write_tensor(x, out_dir / rel)
        entries.append(SampleEntry(rel, y, s))
    manifest = DatasetManifest(list(classes), entries, norm_stats, normalize_flag, str(out_dir))
    write_atomic(out_dir / "manifest.json", manifest.to_json())
    return manifest


def cmd_preprocess(args, out: Output) -> None:
    _positive_int("--fmax", args.fmax)
    _positive_int("--pmax", args.pmax)
    if args.shape and args.pmax * pointcloud.D != pointcloud.FEATURES_PER_FRAME:
        raise ParameterError(f"--shape needs pmax * 4 = {pointcloud.FEATURES_PER_FRAME}")
    if not args.out:
        raise ParameterError("preprocess needs --out DIR")
    classes, recs = _read_recordings(Path(args.raw_dir))
    tensors = pmap(lambda r: pointcloud.build_sample(pointcloud.read_recording_csv(r[1]),
                                                     args.fmax, args.pmax), recs)
    labels = [c for c, _ in recs]
    splits = stratified_split(labels, args.test_fraction, np.random.default_rng(args.seed))
    train = [x for x, s in zip(tensors, splits) if s == "train"]
    stats = pointcloud.compute_norm_stats(train)
    normalize_flag = not args.no_normalize
    if args.shape:
        # channels are gone after shaping, so normalization is baked in here
        if normalize_flag:
            tensors = [pointcloud.normalize(x, stats) for x in tensors]
        tensors = [pointcloud.shape_sample(x, args.shape) for x in tensors]
        normalize_flag = False
    stems = [f"{i:05d}_{f.stem}" for i, (_, f) in enumerate(recs)]
    _write_dataset(Path(args.out), classes, tensors, labels, splits, stems, stats, normalize_flag)
    n_test = splits.count("test")
    out.note(f"{len(tensors)} samples ({len(tensors) - n_test} train, {n_test} test) in {args.out}")


def cmd_lowpass(args, out: Output) -> None:
    if not args.out:
        raise ParameterError("lowpass needs --out FILE")
    if not (args.nu >= 0 and math.isfinite(args.nu)):
        raise ParameterError("--nu must be a finite number >= 0")
    x = tensorfile.read_tensor(args.tensor)
    y = lowpass.radial_lowpass(x, args.nu)
    write_atomic(args.out, tensorfile.encode_tensor(y))
    out.note(f"filtered {x.shape} with nu={args.nu!r}")


def cmd_synth(args, out: Output) -> None:
    if not args.out:
        raise ParameterError("synth needs --out DIR")
    try:
        bins = tuple(int(b) for b in args.bins.split(","))
    except ValueError:
        raise ParameterError(f"--bins must be comma-separated integers, got {args.bins!r}") from None
    samples, labels = tone_dataset(bins, args.n_per_class, args.L, args.amplitude, args.noise,
                                   seed=args.seed)
    names = [f"tone{b}" for b in bins]
    labels = [names[y] for y in labels]
    splits = stratified_split(labels, args.test_fraction, np.random.default_rng(args.seed + 1))
    stems = [f"{i:05d}" for i in range(len(samples))]
    _write_dataset(Path(args.out), names, samples, labels, splits, stems, None, False)
    out.note(f"{len(samples)} samples, tones at bins {list(bins)}, L={args.L}")


def cmd_robustness(args, out: Output) -> None:
    ref = DiSpectrum.from_json(read_text(args.reference))
    other = DiSpectrum.from_json(read_text(args.other))
    if ref.grid.L != other.grid.L:
        raise DataError(f"grids differ: L={ref.grid.L} vs L={other.grid.L}")
    cmp = compare_pmfs(ref.di_norm, other.di_norm)
    out.product(dumps(cmp))
    out.note(f"spearman {cmp['spearman']:.4f}, JS {cmp['js_divergence']:.4g} bits, "
             f"peak shift {cmp['peak_shift']}")


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (or directory for preprocess/synth)")
    common.add_argument("--seed", type=int, default=0, help="seed for splits and synthetic data")
    common.add_argument("--quiet", action="store_true", help="suppress the summary")

    p = argparse.ArgumentParser(prog="dfma", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("di", cmd_di, "discriminative index spectrum of a dataset's training split")
    sp.add_argument("manifest")
    sp.add_argument("--split", default="train", choices=("train", "test"))
    sp.add_argument("--reduce", default="mean", choices=REDUCTIONS)
    sp.add_argument("--preproc", default="demean", choices=PREPROC_MODES)
    sp.add_argument("--window", default="rect", choices=WINDOWS)
    sp.add_argument("--epsilon", type=float, default=1e-12)

    sp = add("template", cmd_template, "DC-normalized LIF power template as CSV")
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--L", type=int, required=True)

    sp = add("fms", cmd_fms, "frequency-matching score over a beta sweep")
    sp.add_argument("di_json")
    sp.add_argument("--betas", default=DEFAULT_BETAS, help="start:stop:step or comma list")

    sp = add("select-beta", cmd_select_beta, "reference boundary from an FMS curve")
    sp.add_argument("fms_csv")
    sp.add_argument("--under-threshold", type=float, default=DEFAULT_UNDER_THRESHOLD)

    sp = add("bandwidth", cmd_bandwidth, "half-power cutoff of the LIF template")
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--L", type=int)

    sp = add("simulate", cmd_simulate, "run a single LIF neuron over an input series")
    sp.add_argument("config")
    sp.add_argument("inputs")
    sp.add_argument("--T", type=int)
    sp.add_argument("--u0", type=float, default=0.0)

    sp = add("validity", cmd_validity, "spike-rate validity flag for a beta sweep")
    sp.add_argument("rates")
    sp.add_argument("--gamma-min", type=float, default=DEFAULT_GAMMA_MIN)
    sp.add_argument("--gamma-max", type=float, default=DEFAULT_GAMMA_MAX)
    sp.add_argument("--kappa", type=float, default=DEFAULT_KAPPA)
    sp.add_argument("--eps", type=float, default=DEFAULT_FLAG_EPS)

    sp = add("energy", cmd_energy, "theoretical compute energy of an architecture")
    sp.add_argument("arch")
    sp.add_argument("--e-mac", type=float, default=4.6)
    sp.add_argument("--e-ac", type=float, default=0.9)
    sp.add_argument("--table", action="store_true", help="write the text table instead of JSON")

    sp = add("preprocess", cmd_preprocess, "raw point-cloud CSVs to tensor files and a manifest")
    sp.add_argument("raw_dir")
    sp.add_argument("--fmax", type=int, default=pointcloud.DEFAULT_F_MAX)
    sp.add_argument("--pmax", type=int, default=pointcloud.DEFAULT_P_MAX)
    sp.add_argument("--shape", choices=pointcloud.SHAPE_MODES)
    sp.add_argument("--no-normalize", action="store_true")
    sp.add_argument("--test-fraction", type=float, default=0.2)

    sp = add("lowpass", cmd_lowpass, "radial spatial low-pass of a tensor file")
    sp.add_argument("tensor")
    sp.add_argument("--nu", type=float, required=True)

    sp = add("synth", cmd_synth, "write a seeded two-tone synthetic dataset")
    sp.add_argument("--bins", default="1,3")
    sp.add_argument("--n-per-class", type=int, default=20)
    sp.add_argument("--L", type=int, default=16)
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--noise", type=float, default=0.3)
    sp.add_argument("--test-fraction", type=float, default=0.2)

    sp = add("robustness", cmd_robustness, "compare two DI spectra")
    sp.add_argument("reference")
    sp.add_argument("other")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        thread_count()
        args.func(args, Output(args))
    except ParameterError as exc:
        print(f"dfma: error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (DataError, OSError) as exc:
        print(f"dfma: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"dfma: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
