"""Command-line entry point.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import analysis, export, experiments
from .errors import InvalidArgumentError, SolverError, TFDenoiseError, WavFormatError
from .filters import FilterParams
from .signal_core import DEFAULT_SEED, Signal, bandpass_downsample, experiment1_signals, load_wav

log = logging.getLogger("tfdenoise")

EXIT_USAGE = 2
EXIT_NUMERIC = 3
ALL_FILTERS = ("nf", "yaroslavsky", "tv")


@dataclass
class RunConfig:
    """Everything a command needs; round-trips through JSON with these field names."""

    input: str | None = None
    synthetic: bool = False
    fs: float = experiments.EXPERIMENT1_FS
    window_sigma: float = experiments.EXPERIMENT1_STFT.window_sigma
    window_length: int = experiments.EXPERIMENT1_STFT.window_length
    hop: int = experiments.EXPERIMENT1_STFT.hop
    nfft: int = experiments.EXPERIMENT1_STFT.n_fft
    band: list | None = None  # [f_lo, f_hi] pre-filter for recordings
    filters: list | None = None  # None: nf for denoise, all three for experiment1
    h: float = 10.0
    rho: float = 10.0
    eps: float = 0.02
    dtau: float = 2.5
    tol: float = 0.04
    max_iter: int = 100
    steps: int | None = None
    alpha: float = 1.0
    beta: str | float = "auto"
    i_min: float | None = None
    seed: int = DEFAULT_SEED
    q: int = 255
    out_dir: str = "out"

    def filter_params(self) -> FilterParams:
        return FilterParams(h=self.h, rho=self.rho, eps=self.eps, dtau=self.dtau, tol=self.tol,
                            max_iter=self.max_iter, Q=self.q, n_steps=self.steps)

    def stft_config(self) -> experiments.STFTConfig:
        return experiments.STFTConfig(self.window_sigma, self.window_length, self.hop, self.nfft)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


# -- helpers -----------------------------------------------------------------

def _signals(cfg: RunConfig) -> tuple[Signal | None, Signal]:
    """(clean reference or None, signal to analyse)."""
    if cfg.input and not cfg.synthetic:
        sig = load_wav(cfg.input)
        if len(sig) == 0:
            raise InvalidArgumentError(f"{cfg.input} contains no samples")
        if cfg.band:
            f_lo, f_hi = cfg.band
            sig = bandpass_downsample(sig, f_lo, f_hi, cfg.fs)
        return None, sig
    clean, noisy = experiment1_signals(1.0, cfg.fs, cfg.seed)
    return clean, noisy


def _images(cfg: RunConfig):
    clean, sig = _signals(cfg)
    stft_cfg = cfg.stft_config()
    S, img = stft_cfg.image(sig, cfg.q)
    clean_img = stft_cfg.image(clean, cfg.q)[1] if clean is not None else None
    return S, img, clean_img


def _out(cfg: RunConfig) -> Path:
    p = Path(cfg.out_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- commands ------------------------------------------------------------------

def cmd_spectrogram(cfg: RunConfig) -> dict:
    S, img, _ = _images(cfg)
    out = _out(cfg)
    export.write_pgm(out / "spectrogram.pgm", img, cfg.q)
    export.write_tfr_csv(out / "spectrogram.csv", S)
    return {"shape": list(img.shape), "files": ["spectrogram.pgm", "spectrogram.csv"]}


def cmd_denoise(cfg: RunConfig) -> dict:
    _, img, clean_img = _images(cfg)
    out = _out(cfg)
    params = cfg.filter_params()
    report = {"config": asdict(cfg), "filters": {}}
    for name in cfg.filters or ["nf"]:
        if name not in experiments.FILTERS:
            raise InvalidArgumentError(f"unknown filter {name!r}")
        res = experiments.FILTERS[name](img, params)
        export.write_pgm(out / f"{name}.pgm", res.image, cfg.q)
        entry = res.report()
        if clean_img is not None:
            entry["mse"] = analysis.relative_mse(clean_img, res.image)
        _write_json(out / f"{name}_result.json", entry)
        report["filters"][name] = entry
        log.info("%s: %d iterations, %.3f s%s", name, res.iterations, res.wall_time,
                 f", MSE {entry['mse']:.3f}" if "mse" in entry else "")
    if clean_img is not None:
        report["noisy_mse"] = analysis.relative_mse(clean_img, img)
    _write_json(out / "report.json", report)
    return report


def cmd_iflines(cfg: RunConfig) -> dict:
    _, img, _ = _images(cfg)
    out = _out(cfg)
    params = cfg.filter_params()
    written = []
    sources = {"spectrogram": img}
    for name in cfg.filters or []:
        if name != "none":
            sources[name] = experiments.FILTERS[name](img, params).image
    beta = cfg.beta if cfg.beta == "auto" else float(cfg.beta)
    counts = {}
    for name, im in sources.items():
        track = analysis.extract_if_lines(im, beta=beta, i_min=cfg.i_min)
        path = out / f"iflines_{name}.csv"
        track.to_csv(path)
        written.append(path.name)
        counts[name] = len(track)
    return {"files": written, "points": counts, "beta": cfg.beta, "i_min": cfg.i_min}


def cmd_experiment3(cfg: RunConfig) -> dict:
    out = _out(cfg)
    burst = None
    if cfg.input and not cfg.synthetic:
        _, sig = _signals(cfg)
        stft_cfg = cfg.stft_config()
    else:
        sur = experiments.burst_surrogate(seed=cfg.seed)
        sig, burst = sur.noisy, sur.burst
        stft_cfg = experiments.EXPERIMENT3_STFT
    run = experiments.experiment3(sig, alpha=cfg.alpha, stft_cfg=stft_cfg, Q=cfg.q,
                                  h=cfg.h, tol=cfg.tol, max_iter=cfg.max_iter)
    export.write_pgm(out / "S0.pgm", run.S0, cfg.q)
    export.write_pgm(out / "Sn.pgm", run.Sn, cfg.q)
    export.write_pgm(out / "subtracted.pgm", run.subtracted, cfg.q)
    export.write_tfr_csv(out / "subtracted.csv", run.subtracted)
    for name, (t, e) in run.profiles.items():
        analysis.write_energy_csv(out / f"energy_{name}.csv", t, e)
    report = {
        "alpha": cfg.alpha,
        "argmax_original": run.argmax_time("original"),
        "argmax_subtracted": run.argmax_time("subtracted"),
        "nf": run.nf_result.report(),
    }
    if burst is not None:
        report["burst_window"] = list(burst)
    _write_json(out / "experiment3.json", report)
    return report


def cmd_experiment1(cfg: RunConfig) -> dict:
    cfg.synthetic = True
    cfg.input = None
    if cfg.filters is None:
        cfg.filters = list(ALL_FILTERS)
    return cmd_denoise(cfg)


COMMANDS = {
    "spectrogram": cmd_spectrogram,
    "denoise": cmd_denoise,
    "iflines": cmd_iflines,
    "experiment1": cmd_experiment1,
    "experiment3": cmd_experiment3,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tfdenoise", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", help="16-bit PCM WAV file")
    src.add_argument("--synthetic", action="store_true", default=None,
                     help="use the tone/chirp test signal at 0 dB SNR")
    p.add_argument("--fs", type=float, help="sample rate of the synthetic signal, or "
                   "target rate when --band is given")
    p.add_argument("--band", type=float, nargs=2, metavar=("F_LO", "F_HI"))
    p.add_argument("--window-sigma", type=float)
    p.add_argument("--window-length", type=int)
    p.add_argument("--hop", type=int)
    p.add_argument("--nfft", type=int)
    p.add_argument("--filter", action="append", choices=[*experiments.FILTERS, "all", "none"],
                   help="repeatable; 'all' selects nf, yaroslavsky and tv")
    p.add_argument("--all", action="store_true", help="same as --filter all")
    for name, typ in [("h", float), ("rho", float), ("eps", float), ("dtau", float),
                      ("tol", float), ("max-iter", int), ("steps", int), ("alpha", float),
                      ("i-min", float), ("seed", int), ("q", int)]:
        p.add_argument(f"--{name}", type=typ)
    p.add_argument("--beta", help="IF truncation level, or 'auto' for the image mean")
    p.add_argument("--out-dir")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = RunConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    mapping = {
        "input": "input", "synthetic": "synthetic", "fs": "fs", "band": "band",
        "window_sigma": "window_sigma", "window_length": "window_length", "hop": "hop",
        "nfft": "nfft", "h": "h", "rho": "rho", "eps": "eps", "dtau": "dtau", "tol": "tol",
        "max_iter": "max_iter", "steps": "steps", "alpha": "alpha", "i_min": "i_min",
        "seed": "seed", "q": "q", "beta": "beta", "out_dir": "out_dir",
    }
    for arg, attr in mapping.items():
        val = getattr(args, arg)
        if val is not None:
            setattr(cfg, attr, val)
    if args.input:
        cfg.synthetic = False
    if args.all or (args.filter and "all" in args.filter):
        cfg.filters = list(ALL_FILTERS)
    elif args.filter:
        cfg.filters = list(dict.fromkeys(args.filter))
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        result = COMMANDS[args.command](cfg)
    except (FileNotFoundError, WavFormatError, InvalidArgumentError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TFDenoiseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(_jsonable(result), indent=2, sort_keys=True))
    return 0


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


if __name__ == "__main__":
    sys.exit(main())
