"""Command-line front end: ``shannon2d {eval,verify,tiling,pairing} ...``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
input errors.  Reports are JSON lines with sorted keys, so identical inputs
give byte-identical output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import frames, presets, tiling
from .dyadic import Dyadic, DyadicError, DyadicInterval, parse_dyadic
from .generator import (
    DEFAULT_L,
    DEFAULT_M,
    GeneratorSpec,
    psiD_hat,
    psiD_space,
    psiD_space_grid,
    shannon_hat,
)
from .pairing import (
    PairingError,
    PairingSpec,
    load_table,
    save_table,
    verify_bijection,
)
from .testfn import ModeExpansion, StepProfile, TensorSum2D

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Settings shared by every subcommand; CLI flags override the JSON config."""

    pairing: str = "spiral"
    table: Optional[str] = None
    M: int = DEFAULT_M
    L: int = DEFAULT_L
    seed: int = 0
    out: Optional[str] = None
    tolerances: dict = field(default_factory=lambda: {"slack": frames.EXACT_SLACK, "calderon": 1e-3})

    def validate(self) -> None:
        if self.M < 1:
            raise UsageError(f"M must be >= 1, got {self.M}")
        if self.L < 0:
            raise UsageError(f"L must be >= 0, got {self.L}")
        for name, tol in self.tolerances.items():
            if not tol > 0:
                raise UsageError(f"tolerance {name!r} must be > 0")
        if self.pairing == "table" and not self.table:
            raise UsageError("pairing 'table' needs --table PATH")

    def pairing_spec(self) -> PairingSpec:
        if self.table:
            return load_table(self.table)
        return PairingSpec(self.pairing)

    def generator(self) -> GeneratorSpec:
        return GeneratorSpec(self.pairing_spec(), self.M, self.L)


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    path = getattr(args, "config", None)
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(data) - {"pairing", "table", "M", "L", "seed", "out", "tolerances"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        tol = dict(cfg.tolerances)
        tol.update(data.pop("tolerances", {}) or {})
        cfg = replace(cfg, tolerances=tol, **data)
    for name in ("pairing", "table", "M", "L", "seed", "out"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if cfg.table and cfg.pairing == "spiral" and getattr(args, "pairing", None) is None:
        cfg.pairing = "table"
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------

def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i".replace("+-", "-")


def _emit(cfg: RunConfig, name: str, records: list[dict]) -> None:
    lines = [json.dumps(r, sort_keys=True) for r in records]
    text = "\n".join(lines) + ("\n" if lines else "")
    sys.stdout.write(text)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.jsonl").write_text(text)


def _csv_target(cfg: RunConfig, explicit: Optional[str], default_name: str) -> Optional[Path]:
    """``--out x.csv`` names a file; any other ``--out`` is a directory."""
    target = explicit or cfg.out
    if not target:
        return None
    p = Path(target)
    if p.suffix.lower() == ".csv":
        p.parent.mkdir(parents=True, exist_ok=True)
        return p
    p.mkdir(parents=True, exist_ok=True)
    return p / default_name


def _write_csv(path: Optional[Path], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _dy(text: str) -> Dyadic:
    try:
        return parse_dyadic(text)
    except (DyadicError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not an exact dyadic value: {text!r} ({exc})") from None


def _interval(lo: str, hi: str):
    return DyadicInterval.make(_dy(lo), _dy(hi))


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------

def cmd_eval(args, cfg: RunConfig) -> int:
    spec = cfg.generator()
    what = args.what
    if what == "psi-hat":
        if args.s_grid:
            lo, hi, n = _dy(args.s_grid[0]), _dy(args.s_grid[1]), int(args.s_grid[2])
            y = _dy(args.y)
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(("s", "y", "re", "im"))
            step = (hi - lo) * Dyadic.from_fraction(_pow2_frac(n))
            for i in range(n + 1):
                s = lo + step * i
                v = psiD_hat(spec, s, y)
                w.writerow((repr(float(s)), repr(float(y)), repr(v.real), repr(v.imag)))
            _write_csv(_csv_target(cfg, args.out_file, "psi_hat.csv"), buf.getvalue())
            return EXIT_OK
        _need(args, "s", "y")
        print(fmt_complex(psiD_hat(spec, _dy(args.s), _dy(args.y))))
        return EXIT_OK
    if what == "psi-space":
        _need(args, "y")
        L = cfg.L
        y = _dy(args.y)
        if args.x1_grid:
            lo, hi, n = float(_dy(args.x1_grid[0])), float(_dy(args.x1_grid[1])), int(args.x1_grid[2])
            xs = np.linspace(lo, hi, n)
            vals, tail = psiD_space_grid(spec, xs, y, L)
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(("x1", "y", "re", "im", "tail_bound"))
            for x, v in zip(xs.tolist(), vals.tolist()):
                w.writerow((repr(x), repr(float(y)), repr(v.real), repr(v.imag), repr(tail)))
            _write_csv(_csv_target(cfg, args.out_file, "psi_space.csv"), buf.getvalue())
            return EXIT_OK
        _need(args, "x1")
        value, tail = psiD_space(spec, float(_dy(args.x1)), y, L)
        print(f"{fmt_complex(value)} tail_bound={tail!r}")
        return EXIT_OK
    if what == "shannon-hat":
        _need(args, "xi")
        print(shannon_hat(_dy(args.xi)))
        return EXIT_OK
    raise UsageError(f"unknown eval target {what!r}")


def _pow2_frac(n: int):
    from fractions import Fraction

    if n < 1 or n & (n - 1):
        raise UsageError("grid node count must be a power of two so nodes stay dyadic")
    return Fraction(1, n)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def _tensor_inputs(args, spec) -> list[tuple[str, TensorSum2D]]:
    if args.f:
        return [(args.f, TensorSum2D.from_json(_read_json(args.f)))]
    name = args.preset or "family"
    if name == "family":
        return presets.parseval_family(spec)
    try:
        return [(name, presets.tensor_preset(name, spec))]
    except KeyError as exc:
        raise UsageError(str(exc)) from None


def _mode_input(path: Optional[str], preset: Optional[str]) -> Optional[ModeExpansion]:
    if path:
        return ModeExpansion.from_json(_read_json(path))
    if preset:
        try:
            return presets.mode_preset(preset)
        except KeyError as exc:
            raise UsageError(str(exc)) from None
    return None


def _range(pair, default):
    if pair is None:
        return default
    a, b = pair
    if a > b:
        raise UsageError(f"empty range {a}..{b}")
    return range(a, b + 1)


def verify_orthonormality(args, cfg, spec) -> list[dict]:
    R = args.range
    idx = [(k, m) for k in range(-R, R + 1) for m in range(-R, R + 1)]
    worst = 0.0
    cross_nonzero = 0
    tail = 0.0
    for a in idx:
        for b in idx:
            g, tail = frames.gram_entry(spec, a, b)
            target = 1.0 if a == b else 0.0
            worst = max(worst, abs(g - target))
            if a[0] != b[0] and g != 0:
                cross_nonzero += 1
    ok = worst <= tail and cross_nonzero == 0
    return [{"check": "orthonormality", "pass": ok, "lhs": worst, "rhs": 0.0, "defect": worst,
             "bound": tail, "params": {"range": R, "M": spec.M, "entries": len(idx) ** 2,
                                       "cross_scale_nonzero": cross_nonzero}}]


def verify_parseval(args, cfg, spec) -> list[dict]:
    out = []
    for name, f in _tensor_inputs(args, spec):
        act = frames.active_scales(spec, f)
        default_k = range(min(act), max(act) + 1) if act else range(-spec.M - 8, 9)
        ks = _range(args.k_range, default_k)
        ms = _range(args.m_range, None)
        rep = frames.parseval_check(spec, f, ks, ms, slack=cfg.tolerances["slack"])
        rec = rep.to_json()
        rec["params"]["function"] = name
        out.append(rec)
    return out


def verify_continuous(args, cfg, spec) -> list[dict]:
    f2 = _mode_input(args.f2, args.preset)
    g2 = _mode_input(args.g2, args.preset_g) or f2
    if f2 is not None:
        pairs = [(f2, g2)]
    else:
        rng = np.random.default_rng(cfg.seed)
        pairs = [(presets.random_expansion(rng, spec), presets.random_expansion(rng, spec))
                 for _ in range(args.pairs)]
    return [frames.continuous_isometry_check(spec, f, g, cfg.tolerances["slack"]).to_json() for f, g in pairs]


def verify_discrete(args, cfg, spec) -> list[dict]:
    f2 = _mode_input(args.f2, args.preset)
    g2 = _mode_input(args.g2, args.preset_g) or f2
    pairs = [(f2, g2)] if f2 is not None else presets.isometry_pairs(spec, 20, cfg.seed)
    if args.xi is not None:
        xis = [_dy(args.xi)]
    else:
        rng = np.random.default_rng(cfg.seed)
        xis = []
        while len(xis) < args.samples:
            v = int(rng.integers(-(1 << 40), 1 << 40))
            if v:
                xis.append(Dyadic(v, int(rng.integers(-50, 10))))
    out = []
    for xi in xis:
        for f, g in pairs:
            try:
                out.append(frames.discrete_isometry_check(spec, f, g, xi, cfg.tolerances["slack"]).to_json())
            except frames.ZeroFrequency as exc:
                raise UsageError(str(exc)) from None
    return out


def verify_admissibility(args, cfg, spec) -> list[dict]:
    if args.profile:
        prof = StepProfile.from_json(_read_json(args.profile))
        name = args.profile
    else:
        name = args.preset or "shannon-normalized"
        if name not in presets.PROFILE_PRESETS:
            raise UsageError(f"unknown profile preset {name!r}")
        prof = presets.PROFILE_PRESETS[name]()
    try:
        plus, minus = frames.admissibility_integrals(prof)
    except frames.SingularAtZero as exc:
        raise UsageError(str(exc)) from None
    target = 1.0 if args.expect is None else float(args.expect)
    defect = max(abs(plus - target), abs(minus - target))
    ok = defect <= cfg.tolerances["slack"]
    return [{"check": "admissibility", "pass": ok, "lhs": [plus, minus], "rhs": target, "defect": defect,
             "bound": 0.0, "params": {"profile": name}}]


def verify_sampling(args, cfg, spec) -> list[dict]:
    name = args.preset or "quarter"
    if name not in ("quarter", "sinc"):
        raise UsageError("sampling presets: quarter, sinc")
    prof = presets.PROFILE_PRESETS[name]()
    Ts = [args.T] if args.T is not None else [2 ** e for e in range(4, 11)]
    out = []
    for T in Ts:
        try:
            rep = frames.sampling_identity_check(prof, prof, args.k, T, cfg.tolerances["slack"])
        except frames.NotBandLimited as exc:
            raise UsageError(str(exc)) from None
        rec = rep.to_json()
        rec["params"]["preset"] = name
        out.append(rec)
    return out


def verify_calderon(args, cfg, spec) -> list[dict]:
    nu, ns = frames.GRID_PRESETS[args.grid]
    out = []
    for name, f in _tensor_inputs(args, spec) if (args.f or args.preset) else [("band-e00", presets.band_e00())]:
        try:
            sgrid = frames.SGrid(ns, args.s_min, args.s_max)
        except frames.BadGrid as exc:
            raise UsageError(str(exc)) from None
        levels = 3 if args.grid != "coarse" else 0
        rep = frames.calderon_quadrature(spec, f, frames.UGrid(nu), sgrid, cfg.tolerances["calderon"], levels)
        rec = rep.to_json()
        rec["params"]["function"] = name
        rec["params"]["grid"] = args.grid
        rec["params"].pop("backend", None)
        out.append(rec)
    return out


SUITES = {
    "orthonormality": verify_orthonormality,
    "parseval": verify_parseval,
    "continuous-isometry": verify_continuous,
    "discrete-isometry": verify_discrete,
    "admissibility": verify_admissibility,
    "sampling": verify_sampling,
    "calderon": verify_calderon,
}


def cmd_verify(args, cfg: RunConfig) -> int:
    spec = cfg.generator()
    records = SUITES[args.suite](args, cfg, spec)
    _emit(cfg, args.suite, records)
    return EXIT_OK if all(r["pass"] for r in records) else EXIT_FAIL


# --------------------------------------------------------------------------
# tiling
# --------------------------------------------------------------------------

_NAMED_WINDOWS = {
    "unit": tiling.Window4D.unit,
    "cube": lambda: tiling.Window4D((0, 1), (0, 1), (0, Dyadic(1, -1)), (0, 1)),
}


def _window(args) -> tiling.Window4D:
    if args.window in _NAMED_WINDOWS:
        w = _NAMED_WINDOWS[args.window]()
    elif args.window:
        w = tiling.Window4D(*(DyadicInterval.from_json(v) for v in
                              (lambda d: (d["x1"], d["x2"], d["xi1"], d["xi2"]))(_read_json(args.window))))
    else:
        w = tiling.Window4D.unit()
    axes = list(w.axes())
    for i, name in enumerate(("x1", "x2", "xi1", "xi2")):
        v = getattr(args, f"w_{name}", None)
        if v is not None:
            axes[i] = _interval(*v)
    w = tiling.Window4D(*axes)
    if w.only_zero_frequency():
        raise UsageError("xi1 window contains no nonzero frequency")
    return w


def cmd_tiling(args, cfg: RunConfig) -> int:
    spec = cfg.generator()
    op = args.op
    if op == "locate":
        pt = [_dy(v) for v in args.point]
        try:
            idx = tiling.locate_4d(spec, *pt)
        except frames.ZeroFrequency as exc:
            raise UsageError(str(exc)) from None
        print(f"({idx.k},{idx.m})")
        return EXIT_OK if tiling.tile_membership(spec, idx, pt) else EXIT_FAIL
    if op == "covering":
        rep = tiling.covering_check(spec, _window(args), args.samples, cfg.seed)
        rec = rep.to_json()
        rec.pop("backend", None)  # reports must not depend on the kernel backend
        _emit(cfg, "covering", [rec])
        return EXIT_OK if rep.passed else EXIT_FAIL
    if op == "disjointness":
        rep = tiling.disjointness_and_measure(spec, _window(args), cfg.M)
        _emit(cfg, "disjointness", [rep.to_json()])
        return EXIT_OK if rep.passed else EXIT_FAIL
    if op == "export-slice":
        _need(args, "x2", "xi2")
        x1w = _interval(*args.x1_window)
        xi1w = _interval(*args.xi1_window)
        rows = tiling.export_slice(spec, _dy(args.x2), _dy(args.xi2), x1w, xi1w, cfg.M)
        _write_csv(_csv_target(cfg, args.out_file, "slice.csv"), tiling.write_slice_csv(rows))
        return EXIT_OK
    raise UsageError(f"unknown tiling operation {op!r}")


# --------------------------------------------------------------------------
# pairing
# --------------------------------------------------------------------------

def cmd_pairing(args, cfg: RunConfig) -> int:
    ps = cfg.pairing_spec()
    op = args.op
    if op == "pair":
        _need(args, "k", "l")
        print(ps.pair(args.k, args.l))
        return EXIT_OK
    if op == "unpair":
        _need(args, "m")
        k, l = ps.unpair(args.m)
        print(f"{k} {l}")
        return EXIT_OK
    if op == "verify":
        rep = verify_bijection(ps, args.n)
        _emit(cfg, "pairing", [rep.to_json()])
        return EXIT_OK if rep.ok else EXIT_FAIL
    if op == "export":
        target = args.out_file or (str(Path(cfg.out) / "table.json") if cfg.out else None)
        if not target:
            raise UsageError("export needs --out-file PATH or --out DIR")
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        save_table(ps, args.n, target)
        return EXIT_OK
    raise UsageError(f"unknown pairing operation {op!r}")


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory (or a .csv file for CSV exports)")
    p.add_argument("--seed", type=int)
    p.add_argument("--M", type=int, help="band cutoff")
    p.add_argument("--L", type=int, help="mode cutoff")
    p.add_argument("--pairing", choices=("spiral", "boustrophedon", "table"))
    p.add_argument("--table", help="pairing table JSON")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="shannon2d", parents=[common],
                                     description="Exact verification of the psi^D wavelet systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", parents=[common], help="evaluate the generator and the Shannon wavelet")
    pe.add_argument("what", choices=("psi-hat", "psi-space", "shannon-hat"))
    pe.add_argument("--s")
    pe.add_argument("--y")
    pe.add_argument("--x1")
    pe.add_argument("--xi")
    pe.add_argument("--s-grid", nargs=3, metavar=("LO", "HI", "N"))
    pe.add_argument("--x1-grid", nargs=3, metavar=("LO", "HI", "N"))
    pe.add_argument("--out-file")
    pe.set_defaults(func=cmd_eval)

    pv = sub.add_parser("verify", parents=[common], help="run a verification suite")
    pv.add_argument("suite", choices=tuple(SUITES))
    pv.add_argument("--range", type=int, default=3)
    pv.add_argument("--preset")
    pv.add_argument("--preset-g")
    pv.add_argument("--f", help="TensorSum2D JSON")
    pv.add_argument("--f2", help="ModeExpansion JSON")
    pv.add_argument("--g2", help="ModeExpansion JSON")
    pv.add_argument("--profile", help="StepProfile JSON")
    pv.add_argument("--expect", type=float)
    pv.add_argument("--xi")
    pv.add_argument("--samples", type=int, default=50)
    pv.add_argument("--pairs", type=int, default=20)
    pv.add_argument("--k-range", type=int, nargs=2)
    pv.add_argument("--m-range", type=int, nargs=2)
    pv.add_argument("--k", type=int, default=0)
    pv.add_argument("--T", type=int)
    pv.add_argument("--grid", choices=tuple(frames.GRID_PRESETS), default="default")
    pv.add_argument("--s-min", type=float, default=2.0 ** -20)
    pv.add_argument("--s-max", type=float, default=2.0 ** 4)
    pv.set_defaults(func=cmd_verify)

    pt = sub.add_parser("tiling", parents=[common], help="phase-space tiling checks")
    pt.add_argument("op", choices=("locate", "covering", "disjointness", "export-slice"))
    pt.add_argument("--point", nargs=4, metavar=("X1", "X2", "XI1", "XI2"))
    pt.add_argument("--window", help="'unit', 'cube' or a Window4D JSON file")
    for name in ("x1", "x2", "xi1", "xi2"):
        pt.add_argument(f"--w-{name}", nargs=2, metavar=("LO", "HI"), dest=f"w_{name}")
    pt.add_argument("--samples", type=int, default=10000)
    pt.add_argument("--x2")
    pt.add_argument("--xi2")
    pt.add_argument("--x1-window", nargs=2, default=("-4", "4"))
    pt.add_argument("--xi1-window", nargs=2, default=("-1/2", "1/2"))
    pt.add_argument("--out-file")
    pt.set_defaults(func=cmd_tiling)

    pp = sub.add_parser("pairing", parents=[common], help="pairing function D")
    pp.add_argument("op", choices=("pair", "unpair", "verify", "export"))
    pp.add_argument("--k", type=int)
    pp.add_argument("--l", type=int)
    pp.add_argument("--m", type=int)
    pp.add_argument("--n", type=int, default=1000)
    pp.add_argument("--out-file")
    pp.set_defaults(func=cmd_pairing)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = load_config(args)
        return args.func(args, cfg)
    except (UsageError, DyadicError, PairingError, tiling.TooManyTiles, KeyError, ValueError) as exc:
        print(f"shannon2d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
