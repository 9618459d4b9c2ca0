"""Command line front end: ``latticeprod <command> --config cfg.json``.

Every command writes deterministic CSV files into the output directory and
echoes the effective configuration to ``effective_config.json``.  Each CSV
starts with ``#`` comment lines recording the config hash, ``h``, ``alpha``,
``lambda_1`` and ``lambda_2``.  Failures print one JSON object to stderr and
exit with 2 (config), 3 (numeric or range) or 4 (size cap).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .config import ExperimentConfig, load_config
from .cumulant import profile
from .errors import CapExceeded, ConfigInvalid, LatticeProdError, OutOfRange
from .largedev import ld_table
from .limitlaw import SemiStableLaw, auto_tau
from .montecarlo import sample_zn
from .rowarray import compare_cf, condition_table, limit_law_for
from .scheme import build_scheme, find_subsequence


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    return str(x)


class Report:
    """Collects CSV outputs for one command run."""

    def __init__(self, cfg: ExperimentConfig, out_dir: str, quiet: bool):
        self.cfg = cfg
        self.out_dir = out_dir
        self.quiet = quiet
        self.d = cfg.lattice_distribution()
        self.profile = profile(self.d)
        self.lam1, self.lam2 = self.profile.critical_points()
        self._alpha = None
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "effective_config.json"), "w") as fh:
            fh.write(cfg.dumps() + "\n")

    @property
    def alpha(self) -> float:
        if self._alpha is None:
            self._alpha = self.profile.solve_alpha(self.cfg.lam)
        return self._alpha

    def header(self) -> list[str]:
        return [
            f"# config_sha256={self.cfg.sha256}",
            f"# h={fmt(self.d.h)} alpha={fmt(self.alpha)} lambda1={fmt(self.lam1)} lambda2={fmt(self.lam2)}",
        ]

    def write_csv(self, name: str, columns, rows, notes=()):
        path = os.path.join(self.out_dir, name)
        with open(path, "w", newline="") as fh:
            for line in self.header():
                fh.write(line + "\n")
            for note in notes:
                fh.write(f"# {note}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([fmt(v) for v in r])
        self.say(f"wrote {path}")
        return path

    def say(self, msg: str):
        if not self.quiet:
            print(msg)

    def warn(self, msg: str):
        print(f"warning: {msg}", file=sys.stderr)

    def scheme(self):
        return build_scheme(self.profile, self.cfg.lam, self.cfg.n_max)

    def tau_for(self, delta: float) -> float:
        return auto_tau(delta, self.d.h) if self.cfg.tau == "auto" else float(self.cfg.tau)

    def u_grid(self) -> np.ndarray:
        g = self.cfg.u_grid
        return np.linspace(g["min"], g["max"], g["count"])

    def x_grid(self) -> np.ndarray:
        g = self.cfg.x_grid
        return np.linspace(g["min"], g["max"], g["count"])


def cmd_analyze(rep: Report):
    p = rep.profile
    alpha = rep.alpha
    sch = rep.scheme()
    summary = {
        "h": p.h,
        "offset": rep.d.offset,
        "beta0": p.beta0,
        "lambda1": rep.lam1,
        "lambda2": rep.lam2,
        "lambda": rep.cfg.lam,
        "alpha": alpha,
        "psi_d1_alpha": p.psi_d1(alpha),
        "psi_d2_alpha": p.psi_d2(alpha),
        "case": sch.case,
        "n_min": sch.n_min,
    }
    with open(os.path.join(rep.out_dir, "analyze.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    rows = [
        (r.n, r.N, r.log_N, r.c, r.b, r.delta, r.log_A, sch.case, r.skipped)
        for r in sch
    ]
    rep.write_csv("scheme.csv", ["n", "N", "log_N", "c", "b", "delta", "log_A", "case", "skipped"], rows)
    for k in ("h", "beta0", "lambda1", "lambda2", "alpha", "psi_d1_alpha", "psi_d2_alpha"):
        rep.say(f"{k} = {fmt(summary[k])}")
    return summary


def _subsequences(rep: Report, sch):
    for target in rep.cfg.delta_targets:
        ns = find_subsequence(sch, target, rep.cfg.epsilon)
        yield target, ns


def cmd_verify_conditions(rep: Report):
    sch = rep.scheme()
    rows, notes = [], []
    for target, ns in _subsequences(rep, sch):
        if not ns:
            notes.append(f"warning: empty subsequence for delta_target={fmt(target)}")
            rep.warn(notes[-1][9:])
            continue
        tau = rep.tau_for(target)
        for cr in condition_table(None, sch, tau, ns):
            m = cr.moments
            rows.append((
                target, m.n, m.delta, tau, m.tail, cr.limit_tail, m.trunc_mean_centered,
                cr.limit_shift, m.trunc_var, m.trunc_second_moment, cr.limit_trunc_var,
            ))
    cols = [
        "delta_target", "n", "delta_n", "tau", "tail", "limit_tail", "trunc_mean_centered",
        "limit_shift", "trunc_var", "trunc_second_moment", "limit_trunc_var",
    ]
    return rep.write_csv("conditions.csv", cols, rows, notes)


def cmd_compare_cf(rep: Report):
    sch = rep.scheme()
    u = rep.u_grid()
    rows, notes = [], []
    for target, ns in _subsequences(rep, sch):
        if not ns:
            notes.append(f"warning: empty subsequence for delta_target={fmt(target)}")
            rep.warn(notes[-1][9:])
            continue
        n = ns[-1]
        cmp = compare_cf(None, sch, n, u)
        notes.append(f"delta_target={fmt(target)} n={n} delta_n={fmt(cmp.delta)} sup_err={fmt(cmp.sup_err)}")
        for ui, a, b, e in zip(u, cmp.cf_n, cmp.cf_limit, cmp.abs_err):
            rows.append((n, ui, a.real, a.imag, b.real, b.imag, e))
    cols = ["n", "u", "re_cf_n", "im_cf_n", "re_cf_limit", "im_cf_limit", "abs_err"]
    return rep.write_csv("compare_cf.csv", cols, rows, notes)


def cmd_largedev(rep: Report):
    ld = rep.cfg.largedev
    est = ld_table(rep.profile, ld["n"], ld["beta"])
    rows = [e.as_row() for e in est]
    return rep.write_csv("largedev.csv", ["n", "beta", "kind", "log_exact", "log_asymptotic", "ratio"], rows)


def cmd_limit(rep: Report):
    pairs = rep.cfg.limit_pairs
    if pairs is None:
        pairs = [{"alpha": rep.alpha, "delta": t} for t in rep.cfg.delta_targets]
    u, x = rep.u_grid(), rep.x_grid()
    cf_rows, cdf_rows, notes = [], [], []
    for pr in pairs:
        law = SemiStableLaw(pr["alpha"], pr["delta"], rep.d.h, rep.tau_for(pr["delta"]))
        phi = law.cf(u)
        F, err = law.cdf(x, return_error=True)
        notes.append(
            f"alpha={fmt(law.alpha)} delta={fmt(law.delta)} tau={fmt(law.tau)} "
            f"C={fmt(law.C)} cdf_error={fmt(err)}"
        )
        cf_rows += [(law.alpha, law.delta, ui, z.real, z.imag) for ui, z in zip(u, phi)]
        cdf_rows += [(law.alpha, law.delta, xi, fi) for xi, fi in zip(x, F)]
    rep.write_csv("limit_cf.csv", ["alpha", "delta", "u", "re_cf", "im_cf"], cf_rows, notes)
    return rep.write_csv("limit_cdf.csv", ["alpha", "delta", "x", "cdf"], cdf_rows, notes)


def cmd_sample(rep: Report):
    mc = rep.cfg.mc
    sch = rep.scheme()
    n = mc["n"]
    if n is None:
        ok = [m for m in sch.valid_ns if sch.records[m].N <= mc["cap"]]
        if not ok:
            raise CapExceeded(f"no valid n <= n_max has N_n <= {mc['cap']}")
        n = ok[-1]
    law = limit_law_for(sch, n)
    run = sample_zn(None, sch, n, mc["R"], mc["seed"], count_cap=mc["cap"], law=law)
    gap = compare_cf(None, sch, n, rep.u_grid()).sup_err
    tol = 0.05 + run.cdf_error + gap
    summary = (
        f"summary: n={n} N={sch.records[n].N} delta_n={fmt(run.delta)} R={run.replicates} "
        f"seed={run.seed} ks_distance={fmt(run.ks_distance)} cdf_error={fmt(run.cdf_error)} "
        f"cf_gap={fmt(gap)} tolerance={fmt(tol)}"
    )
    path = rep.write_csv("samples.csv", ["replicate", "value"], enumerate(run.samples))
    with open(path, "a") as fh:
        fh.write(f"# {summary}\n")
    rep.say(summary)
    return run


COMMANDS = {
    "analyze": cmd_analyze,
    "verify-conditions": cmd_verify_conditions,
    "compare-cf": cmd_compare_cf,
    "largedev": cmd_largedev,
    "limit": cmd_limit,
    "sample": cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="JSON experiment config")
    common.add_argument("--out", metavar="DIR", help="output directory (default: config 'output')")
    common.add_argument("--quiet", action="store_true", help="suppress progress messages")
    parser = argparse.ArgumentParser(
        prog="latticeprod",
        description="Sums of random products on a lattice: exact tables and semi-stable limits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _fail(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ConfigInvalid) and exc.field is not None:
        payload["field"] = exc.field
    if getattr(exc, "error_estimate", None) is not None:
        payload["error_estimate"] = exc.error_estimate
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        rep = Report(cfg, args.out or cfg.output, args.quiet)
        COMMANDS[args.command](rep)
    except LatticeProdError as exc:
        return _fail(exc, exc.exit_code)
    except OSError as exc:
        return _fail(exc, 2)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
