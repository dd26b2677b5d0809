"""Command-line driver.

    qpoisson fusion --n 3 --ball 4 --q 1/2 --format csv
    qpoisson walk   --n 2 --levy 1:1 --q 1/2 --steps 200 --paths 10000 --seed 7
    qpoisson coset  --q 1/2 --K 300 [--asymptotics] [--p2s 20]
    qpoisson hecke  --n 2 --m 3 --q 1/2 [--variant pi_plus]

Exit status: 0 when every check passes, 1 when a check fails, 2 on a
usage error.  Settings come from defaults, then ``--config`` (JSON or
flat ``key=value``), then flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import centerwalk as cw
from . import cosetwalk as co
from . import hecke as hk
from . import weights as wt
from .qarith import DomainError, QParam, asym_const, q_int
from .report import parse_scalar, write_csv, write_json

log = logging.getLogger("qpoisson")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "common": {"q": "1/2", "mode": None, "format": "csv", "out": ".", "seed": 7},
    "fusion": {"n": None, "ball": wt.DEFAULT_BALL},
    "walk": {
        "n": 2, "ball": 8, "levy": None, "steps": 200, "paths": 10000,
        "dist_steps": 10, "mc_ball": None, "escape": 50, "window": 50,
    },
    "coset": {"K": 300, "asymptotics": False, "p2s": None, "steps": 100, "record_every": 10},
    "hecke": {"n": 2, "m": 3, "variant": "all"},
}


class UsageError(Exception):
    pass


def _load_config(path: str) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
        if not isinstance(data, dict):
            raise UsageError("config JSON must be an object")
        return data
    except json.JSONDecodeError:
        pass
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"bad config line {line!r}")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _coerce(key: str, value, default):
    if value is None:
        return None
    if isinstance(default, bool) or key == "asymptotics":
        if isinstance(value, str):
            return value.lower() in ("1", "true", "yes", "on")
        return bool(value)
    if key in ("n", "m", "ball", "steps", "paths", "seed", "K", "p2s", "dist_steps",
               "mc_ball", "escape", "window", "record_every"):
        try:
            return int(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{key} must be an integer, got {value!r}") from exc
    if key == "levy" and isinstance(value, str):
        return [p for p in value.replace(" ", ";").split(";") if p]
    if key == "q":
        return str(value)
    return value


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags into one flat config."""
    sub = args.command
    defaults = {**DEFAULTS["common"], **DEFAULTS[sub]}
    cfg = dict(defaults)
    if args.config:
        for k, v in _load_config(args.config).items():
            if k not in defaults:
                raise UsageError(f"unknown config key {k!r} for {sub}")
            cfg[k] = _coerce(k, v, defaults[k])
    for k in defaults:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    cfg["command"] = sub
    return cfg


def _q(cfg) -> QParam:
    try:
        return QParam.parse(str(cfg["q"]), cfg.get("mode"))
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _levy(cfg, q: QParam, n: int) -> cw.LevyMeasure:
    specs = cfg.get("levy") or ["1:1"]
    entries = {}
    try:
        for spec in specs:
            w, _, m = spec.rpartition(":")
            if not w:
                raise UsageError(f"levy entry {spec!r} must look like WEIGHT:MASS")
            weight = wt.parse_weight(w, n)
            entries[weight] = entries.get(weight, 0) + parse_scalar(m, q)
        return cw.LevyMeasure(entries, q)
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad levy specification: {exc}") from exc


def _out(cfg, name: str) -> Path:
    d = Path(cfg["out"])
    d.mkdir(parents=True, exist_ok=True)
    return d / f"{cfg['command']}_{name}"


def _emit(cfg, tables: dict, summary: dict, checks: dict) -> int:
    """Write each table (csv or inside the manifest) and the manifest.

    The output directory is left out of the embedded config so that runs
    into different directories stay byte-identical.
    """
    out_dir = cfg["out"]
    cfg = {k: v for k, v in cfg.items() if k != "out"}
    cfg_out = dict(cfg, out=out_dir)
    results = [{"summary": summary, "checks": checks}]
    if cfg["format"] == "csv":
        for name, (header, rows) in tables.items():
            h = write_csv(_out(cfg_out, f"{name}.csv"), header, rows, cfg)
            results.append({"table": name, "file": f"{cfg['command']}_{name}.csv", "sha256": h})
    else:
        for name, (header, rows) in tables.items():
            results.append({"table": name, "columns": list(header), "rows": [list(r) for r in rows]})
    write_json(_out(cfg_out, "manifest.json"), cfg, results)
    failed = [k for k, ok in checks.items() if not ok]
    for k, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {k}")
    return EXIT_FAIL if failed else EXIT_OK


def run_fusion(cfg) -> int:
    if cfg.get("n") is None:
        raise UsageError("fusion needs --n")
    n, q = cfg["n"], _q(cfg)
    if n < 2:
        raise UsageError("--n must be >= 2")
    ball = wt.weights_in_ball(n, cfg["ball"])
    table = wt.fusion_table(ball)
    sums_ok = all(wt.check_sum_rules(a, b, q) for a in ball for b in ball)
    m0_rows = [(lam, wt.classical_dim(lam), wt.zero_weight_dim(lam)) for lam in ball]
    ineq_rows = []
    ineq_ok = eq_ok = True
    for U in ball:
        for V in ball:
            N = wt.mult_in_self_tensor(U, V)
            m0 = wt.zero_weight_dim(V)
            crit = wt.equality_criterion(U, V)
            ineq_ok &= N <= m0
            if crit:
                eq_ok &= N == m0
            ineq_rows.append((U, V, N, m0, crit))
    tables = {
        "fusion": (("lambda", "mu", "nu", "mult"), table),
        "m0": (("lambda", "dim", "m0"), m0_rows),
        "inequality": (("U", "V", "N_UUV", "m0_V", "criterion"), ineq_rows),
    }
    summary = {"weights": len(ball), "products": len(ball) ** 2}
    checks = {"sum_rules": sums_ok, "N_le_m0": ineq_ok, "criterion_equality": eq_ok}
    return _emit(cfg, tables, summary, checks)


def run_walk(cfg) -> int:
    n, q = cfg["n"], _q(cfg)
    levy = _levy(cfg, q, n)
    kernel = cw.build_kernel(cfg["ball"], levy, q)
    one = q.scalar(1)
    stoch = all(
        q.close(sum(r.values(), q.scalar(0)) + c, one) for r, c in zip(kernel.rows, kernel.cemetery)
    )
    eig = cw.dim_ratio_eigencheck(levy, q, cfg["ball"])
    eig_ok = (eig.residual == 0) if q.is_exact else eig.residual <= q.tol
    lam_ok = (eig.eigenvalue < 1) == levy.nontrivial

    kernel_rows = [(s, t, p) for s in kernel.states for t, p in kernel.row(s).items()]
    dist_rows = []
    dist = {wt.trivial(n): one}
    for step in range(cfg["dist_steps"] + 1):
        if step:
            dist = cw.step_distribution(kernel, dist)
        for t in sorted((k for k in dist if k is not cw.CEMETERY)):
            dist_rows.append((t, dist[t], step))
        if cw.CEMETERY in dist:
            dist_rows.append((cw.CEMETERY, dist[cw.CEMETERY], step))

    reach = max(nu.size for nu in levy.entries)
    mc_ball = cfg["mc_ball"] or max(cfg["ball"], cfg["steps"] * max(reach, 1))
    mc_kernel = cw.build_kernel(mc_ball, levy, q)
    paths = cw.sample_index_paths(mc_kernel, cfg["paths"], cfg["steps"], cfg["seed"])
    sizes = np.array([s.size for s in mc_kernel.states] + [-1])
    final = sizes[paths[:, -1]]
    escape = float(np.mean((final > cfg["escape"]) | (paths[:, -1] == len(mc_kernel.states))))
    mc_ok, mc_rows = _mc_agreement(mc_kernel, paths, steps=(1, 2))
    trace = cw.martingale_trace(
        paths, lambda w: 0.0 if w is cw.CEMETERY else float(cw.dim_ratio(w, q)),
        window=min(cfg["window"], cfg["steps"]), kernel=mc_kernel,
    )

    summary = {
        "rng": cw.RNG_ALGORITHM, "kernel_states": len(kernel.states),
        "eigenvalue": eig.eigenvalue, "eigen_residual": eig.residual,
        "interior_states": eig.interior, "mc_ball": mc_ball,
        "escape_fraction": escape, "escape_threshold": cfg["escape"],
        "tail_oscillation_max": float(trace.oscillation.max()),
        "tail_converged_fraction": trace.converged_fraction,
    }
    checks = {
        "row_stochastic": stoch, "eigen_identity": eig_ok, "eigenvalue_below_one": lam_ok,
        "mc_within_4sigma": mc_ok, "escape_fraction_ge_0.99": escape >= 0.99,
    }
    tables = {
        "kernel": (("s", "t", "p"), kernel_rows),
        "distribution": (("t", "mass", "step"), dist_rows),
        "montecarlo": (("step", "t", "exact", "empirical", "sigma", "z"), mc_rows),
    }
    return _emit(cfg, tables, summary, checks)


def _mc_agreement(kernel: cw.TransitionKernel, paths: np.ndarray, steps=(1, 2), nsigma: float = 4.0):
    """Compare empirical step laws with exact kernel powers (binomial sigma)."""
    count = paths.shape[0]
    lookup = list(kernel.states) + [cw.CEMETERY]
    ok = True
    rows = []
    for step in steps:
        exact = cw.distribution_after(kernel, step)
        emp = np.bincount(paths[:, step - 1], minlength=len(lookup)) / count
        for i, t in enumerate(lookup):
            p = float(exact.get(t, 0))
            if p == 0 and emp[i] == 0:
                continue
            sigma = max((p * (1 - p) / count) ** 0.5, 1e-12)
            z = (emp[i] - p) / sigma
            ok &= abs(z) <= nsigma
            rows.append((step, t, p, float(emp[i]), sigma, float(z)))
    return bool(ok), rows


def run_coset(cfg) -> int:
    q = _q(cfg)
    K = cfg["K"]
    cert = co.eigen_sequence(q, K)
    pos_ok = co.positivity_rewrite_check(cert)
    grid = co.Grid(q, K)
    Af = co.apply_A_half(cert.f, grid)
    points = grid.points
    cert_rows = [
        (k, points[k], cert.a[k], (Af.values[k] - cert.eigenvalue * cert.a[k]) if k < K else None)
        for k in range(K + 1)
    ]
    checks = {"certificate": cert.certified, "positivity_rewrite": pos_ok}
    summary = {
        "q": q.value, "K": K, "lambda": cert.eigenvalue, "min_f": cert.min_f,
        "residual": cert.residual, "policy": "step past K lands on 0 (absorbing)",
    }
    tables = {"certificate": (("k", "t_k", "a_k", "residual"), cert_rows)}

    evo_rows = []
    at_zero = []
    for step, nu in enumerate(co.iterate_measure(co.GridMeasure.point(grid, 0), grid, cfg["steps"])):
        at_zero.append(nu.at_zero)
        if step % cfg["record_every"] == 0 or step == cfg["steps"]:
            evo_rows += [(step, points[k], m) for k, m in enumerate(nu.masses) if m != 0]
            evo_rows.append((step, 0, nu.at_zero))
    checks["mass_at_zero_monotone"] = all(a <= b for a, b in zip(at_zero, at_zero[1:]))
    summary["mass_at_zero_final"] = at_zero[-1]
    tables["measure"] = (("step", "point", "mass"), evo_rows)

    if cfg["asymptotics"]:
        C = asym_const(q, 128)
        ratios = co.asymptotic_ratios(cert, C.value)
        tables["asymptotics"] = (("k", "ratio"), ratios)
        summary["asym_const"] = C.value
        summary["asym_terms"] = C.terms
        summary["asym_deviation_at_K"] = abs(ratios[-1][1] - 1)
        if K >= 500:
            checks["asymptotics_within_1pct"] = abs(ratios[-1][1] - 1) <= 0.01

    if cfg["p2s"] is not None:
        x = 2 / q_int(2, q)
        rows = []
        for j in range(cfg["p2s"] + 1):
            val = co.poly_eval(co.chebyshev_p(j, q), x)
            target = q.scalar(j + 1) / q_int(j + 1, q)
            rows.append((j, val, target, q.close(val, target)))
        tables["p2s"] = (("two_s", "p_2s_at_2_over_q2", "ratio", "equal"), rows)
        checks["p2s_identity"] = all(r[3] for r in rows)
    return _emit(cfg, tables, summary, checks)


def run_hecke(cfg) -> int:
    n, m, q = cfg["n"], cfg["m"], _q(cfg)
    variants = hk.VARIANTS if cfg["variant"] == "all" else (cfg["variant"],)
    if any(v not in hk.VARIANTS for v in variants):
        raise UsageError(f"unknown variant {cfg['variant']!r}")
    if n < 2 or m < 2:
        raise UsageError("--n and --m must be >= 2")
    if n > hk.MAX_DIM or m > hk.MAX_SITES:
        raise UsageError(f"dense caps: n <= {hk.MAX_DIM}, m <= {hk.MAX_SITES}")
    tol = 0 if q.is_exact else q.tol
    rows, reports = [], []
    checks = {}
    dens = hk.invariant_density(n, q)
    for v in variants:
        rep = hk.check_hecke(n, m, q, v)
        E = hk.cond_expect_last(hk.g1_matrix(n, q, v), dens)
        for rel, r in rep.residuals.items():
            rows.append((v, rel, r))
        checks[f"{v}_relations"] = rep.passed(tol)
        reports.append({
            "variant": v, "n": n, "m": m, "q": q.value, "residuals": rep.residuals,
            "E_scalar": E.is_scalar(), "E_value": E.diagonal()[0] if E.is_scalar() else None,
            "E_diagonal": E.diagonal(),
        })
        if v == "pi":
            checks["E_pi_not_scalar"] = not E.is_scalar()
        else:
            checks[f"E_{v}_scalar"] = E.is_scalar() if q.is_exact else _float_scalar(E, q.tol)
    summary = {"reports": reports, "density": list(dens.weights)}
    return _emit(cfg, {"relations": (("variant", "relation", "residual"), rows)}, summary, checks)


def _float_scalar(E: hk.ChainOperator, tol: float) -> bool:
    d = np.array(E.diagonal(), dtype=float)
    off = E.matrix.astype(float) - np.diag(d)
    return bool(np.all(np.abs(off) <= tol) and np.ptp(d) <= tol)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpoisson", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config")
        sp.add_argument("--q", help='"p/r" for exact mode, a decimal for float mode')
        sp.add_argument("--mode", choices=("exact", "float"))
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int)

    f = sub.add_parser("fusion", help="fusion tables, m0 and the N <= m0 estimate")
    common(f)
    f.add_argument("--n", type=int)
    f.add_argument("--ball", type=int)

    w = sub.add_parser("walk", help="random walk on the center")
    common(w)
    w.add_argument("--n", type=int)
    w.add_argument("--ball", type=int)
    w.add_argument("--levy", action="append", help="WEIGHT:MASS, repeatable (e.g. 1:1/2)")
    w.add_argument("--steps", type=int)
    w.add_argument("--paths", type=int)
    w.add_argument("--dist-steps", dest="dist_steps", type=int)
    w.add_argument("--mc-ball", dest="mc_ball", type=int)
    w.add_argument("--escape", type=int)
    w.add_argument("--window", type=int)

    c = sub.add_parser("coset", help="SU_q(2) double-coset operator")
    common(c)
    c.add_argument("--K", type=int)
    c.add_argument("--asymptotics", action="store_true", default=None)
    c.add_argument("--p2s", type=int)
    c.add_argument("--steps", type=int)
    c.add_argument("--record-every", dest="record_every", type=int)

    h = sub.add_parser("hecke", help="Hecke relations and conditional expectations")
    common(h)
    h.add_argument("--n", type=int)
    h.add_argument("--m", type=int)
    h.add_argument("--variant", choices=("all",) + hk.VARIANTS)
    return p


RUNNERS = {"fusion": run_fusion, "walk": run_walk, "coset": run_coset, "hecke": run_hecke}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = resolve(args)
        return RUNNERS[args.command](cfg)
    except (UsageError, DomainError) as exc:
        print(f"qpoisson {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
