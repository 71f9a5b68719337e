"""Command line scenario runner.

    parafvp run CONFIG [--out-dir DIR] [--seed N] [--svg] [--log-cap X]
    parafvp validate CONFIG

Flags fall back to FVP_OUT_DIR, FVP_SEED, FVP_SVG and FVP_LOG_CAP, then to
the config. Exit codes: 0 success, 1 usage or validation error, 2 final data
incompatible.
"""
import argparse
import copy
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from . import config as cfgmod
from .boundary import boundary_yield, inhom_forward_solve, poisson_extend
from .diagnostics import backward_conditioning_report, instability_table, weyl_check
from .errors import FVPError
from .final_value import analyze, solve_fvp
from .forward import duhamel_solve, stability_check, x_norm
from .matrix_model import build, counterexample, height_function
from .steering import steer, verify_steering

EXIT_OK, EXIT_USAGE, EXIT_INCOMPATIBLE = 0, 1, 2


def fmt(x):
    """Shortest round-trip text for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        if x.imag == 0:
            return repr(float(x.real))
        return repr(complex(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def _write_trajectory(path, traj):
    rows = []
    for t, c in zip(traj.times, traj.coeffs):
        for j, v in enumerate(c):
            rows.append((float(t), j + 1, float(v.real), float(v.imag)))
    _write_csv(path, ["t", "mode", "value_re", "value_im"], rows)


def _write_svg(path, title, xlabel, ylabel, x, ys, labels=None, logy=False):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "parafvp"
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, y in enumerate(ys):
        ax.plot(x, y, label=None if labels is None else labels[i])
    if logy:
        ax.set_yscale("log")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if labels is not None:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _plot_modes(path, title, traj, n_show=6):
    amps = np.abs(traj.coeffs[:, :n_show]).T
    _write_svg(path, title, "t", "|u_j(t)|", traj.times, amps,
               [f"mode {j + 1}" for j in range(amps.shape[0])])


def _vector_rows(prefix, v):
    return [(f"{prefix}_mode_{j + 1}", c) for j, c in enumerate(v.coeffs)]


def _common(cfg):
    es = cfgmod.build_basis(cfg)
    T = float(cfg["time"]["T"])
    M = int(cfg["time"].get("M", 16))
    data = cfg.get("data", {})
    return es, T, M, data


def run_forward(cfg, rng, out_dir, svg, scen="forward"):
    es, T, M, data = _common(cfg)
    u0 = cfgmod.build_vector(es, data.get("u0"), rng)
    f = cfgmod.build_signal(es, data.get("f"), T, M, rng)
    g = cfgmod.build_boundary(data.get("g"), T, M)
    times = cfgmod.out_times(cfg)
    traj = inhom_forward_solve(es, u0, f, g, times)
    rows = [("final_norm", traj.final.norm())]
    if g is None:
        st = stability_check(es, u0, f, traj)
        rows += [("x_norm", x_norm(traj, f)), ("sup_ratio", st.sup_ratio),
                 ("l2v_ratio", st.l2v_ratio), ("stability_passed", st.passed)]
    else:
        zg = boundary_yield(es, g, T)
        k0 = poisson_extend(es, complex(g.left[-1]), complex(g.right[-1]))
        rows += [("steady_state_gap", (traj.final - k0).norm())]
        rows += _vector_rows("z_g", zg.z_g)
        tr = zg.eps_trace
        rows += [(f"eps_gap_{i}", e) for i, e in enumerate(tr.gap)]
        rows += [("eps_monotone", tr.monotone())]
    rows += _vector_rows("u_T", traj.final)
    _write_trajectory(os.path.join(out_dir, f"{scen}_trajectory.csv"), traj)
    if svg:
        _plot_modes(os.path.join(out_dir, f"{scen}.svg"), f"{scen} solution", traj)
    return EXIT_OK, rows, f"{scen}: solved to T={T!r}"


def run_backward(cfg, rng, out_dir, svg):
    es, T, M, data = _common(cfg)
    log_cap, tail_tol = cfgmod.thresholds(cfg)
    u_T = cfgmod.build_vector(es, data.get("u_T"), rng)
    f = cfgmod.build_signal(es, data.get("f"), T, M, rng)
    g = cfgmod.build_boundary(data.get("g"), T, M)
    rep = analyze(es, u_T, f, g, T, log_cap, tail_tol)
    rows = [
        ("verdict", rep.verdict),
        ("worst_mode", rep.worst_mode),
        ("worst_log_amplification", rep.worst_log_amplification),
        ("log_conditioning", rep.log_conditioning),
        ("y_graph_norm", rep.y_graph_norm),
    ]
    if rep.diagnostic is not None:
        rows += [("tail_verdict", rep.diagnostic.verdict),
                 ("tail_ratio", rep.diagnostic.tail_ratio)]
    if not rep.compatible:
        return (EXIT_INCOMPATIBLE, rows,
                f"backward: incompatible (worst mode {rep.worst_mode}, "
                f"log-amplification {rep.worst_log_amplification:.6g})")
    rows += _vector_rows("u0", rep.reconstructed_u0)
    traj = solve_fvp(es, u_T, f, g, out_grid=cfgmod.out_times(cfg), report=rep)
    _write_trajectory(os.path.join(out_dir, "backward_trajectory.csv"), traj)
    if svg:
        _plot_modes(os.path.join(out_dir, "backward.svg"), "backward solution", traj)
    return EXIT_OK, rows, "backward: compatible"


def run_steer(cfg, rng, out_dir, svg):
    es, T, M, data = _common(cfg)
    log_cap, _ = cfgmod.thresholds(cfg)
    v = cfgmod.build_vector(es, data.get("v"), rng)
    T0 = cfg["time"].get("T0")
    ctl = steer(es, v, T, T0, log_cap)
    chk = verify_steering(es, ctl, v, T)
    sig, err = ctl.to_modal_signal(M, preserve_yield=True)
    traj = duhamel_solve(es, None, sig, cfgmod.out_times(cfg))
    rows = [("residual", chk.residual), ("control_vstar_norm", chk.control_vstar_norm),
            ("max_bound_ratio", chk.max_bound_ratio), ("norm_bound", chk.norm_bound),
            ("resampling_error", err)]
    _write_csv(os.path.join(out_dir, "control.csv"),
               ["mode", "theta", "k_re", "k_im", "rate"],
               [(j + 1, ctl.theta[j], ctl.k[j].real, ctl.k[j].imag, ctl.rate[j])
                for j in range(es.n_modes)])
    _write_trajectory(os.path.join(out_dir, "steer_trajectory.csv"), traj)
    if svg:
        _plot_modes(os.path.join(out_dir, "steer.svg"), "steered state", traj)
    return EXIT_OK, rows, f"steer: residual {chk.residual:.3g}"


def run_diagnostics(cfg, rng, out_dir, svg):
    es = cfgmod.build_basis(cfg)
    log_cap, _ = cfgmod.thresholds(cfg)
    d = cfg.get("diagnostics", {})
    T = float(cfg.get("time", {}).get("T", 1.0))
    table = instability_table(es, T, d.get("k_max"), log_cap)
    _write_csv(os.path.join(out_dir, "instability.csv"),
               ["k", "eigenvalue", "log_amplification", "amplification", "flagged"],
               [(r.k, r.eigenvalue, r.log_amplification, r.amplification, r.flagged)
                for r in table])
    cond = backward_conditioning_report(es, d.get("T_list", [0, 1, 4]), log_cap)
    _write_csv(os.path.join(out_dir, "conditioning.csv"),
               ["T", "max_recoverable", "witness_norm_t", "witness_norm_2t"],
               [(r.T, r.max_recoverable, r.witness_norm_t, r.witness_norm_2t) for r in cond])
    rows = [("n_modes", es.n_modes), ("T", T)]
    cut = d.get("weyl_cut", es.complete_cutoff())
    if es.domain_kind != "interval" and "weyl_cut" not in d:
        cut = float(np.max(es.eigenvalues[es.eigenvalues < es.complete_cutoff()]))
    w = weyl_check(es, cut)
    rows += [("weyl_cut", cut), ("weyl_count", w.count), ("weyl_predicted", w.predicted),
             ("weyl_ratio", w.ratio)]
    if svg:
        _write_svg(os.path.join(out_dir, "instability.svg"), "backward amplification", "k",
                   "T lambda_k", [r.k for r in table], [[r.log_amplification for r in table]])
    return EXIT_OK, rows, f"diagnostics: {len(table)} modes tabulated"


def run_matrix(cfg, rng, out_dir, svg):
    m = cfg["matrix"]
    if m.get("preset") == "counterexample":
        A = counterexample(float(m.get("lam", 1.0)), float(m.get("delta", 0.5)))
    else:
        A = np.array(m["real"], dtype=complex)
        if "imag" in m:
            A = A + 1j * np.array(m["imag"], dtype=float)
    model = build(A, int(m.get("n_samples", 10**4)), cfg.get("seed", 0))
    T = float(cfg["time"]["T"])
    M = int(cfg["time"].get("M", 16))
    u0 = cfg.get("data", {}).get("u0")
    if u0 is None:
        u0 = rng.normal(size=model.n) + 1j * rng.normal(size=model.n)
    t = np.linspace(0.0, T, M + 1)
    h = height_function(model, u0, t)
    _write_csv(os.path.join(out_dir, "height.csv"), ["t", "h"], zip(h.t, h.h))
    rows = [
        ("m_A", model.m_A),
        ("sector_half_angle", model.sector_half_angle),
        ("analytic_half_angle", model.analytic_half_angle),
        ("hyponormal", model.hyponormal),
        ("accretive_square", model.accretive_square),
        ("herm_square_min_eig", model.herm_square_min_eig),
        ("h_decreasing", h.decreasing),
        ("h_convex", h.convex),
        ("convexity_expected", h.convexity_expected),
        ("h_slope0", h.slope0),
        ("re_numerical_range_u0", h.re_numerical),
    ]
    if svg:
        _write_svg(os.path.join(out_dir, "height.svg"), "height function", "t", "h(t)",
                   h.t, [h.h])
    return EXIT_OK, rows, f"matrix: m_A={model.m_A:.6g}"


RUNNERS = {
    "forward": run_forward,
    "backward": run_backward,
    "steer": run_steer,
    "boundary": lambda cfg, rng, out, svg: run_forward(cfg, rng, out, svg, "boundary"),
    "diagnostics": run_diagnostics,
    "matrix": run_matrix,
}


def effective_config(cfg, seed=None, log_cap=None):
    """Config with command-line/environment overrides folded in."""
    cfg = copy.deepcopy(cfg)
    if seed is not None:
        cfg["seed"] = int(seed)
    if log_cap is not None:
        cfg.setdefault("thresholds", {})["log_cap"] = float(log_cap)
    return cfg


def run(cfg, out_dir, svg=False):
    """Run a validated config; returns ``(exit_code, verdict_line)``."""
    scen = cfg["scenario"]
    rng = np.random.default_rng(cfg.get("seed", 0))
    os.makedirs(out_dir, exist_ok=True)
    code, rows, line = RUNNERS[scen](cfg, rng, out_dir, svg)
    head = [("version", __version__), ("config_hash", cfgmod.config_hash(cfg)),
            ("scenario", scen)]
    _write_csv(os.path.join(out_dir, f"{scen}_report.csv"), ["name", "value"], head + rows)
    return code, line


def _load(path):
    try:
        return cfgmod.load(path), None
    except OSError as err:
        return None, f"{path}: {err.strerror}"
    except json.JSONDecodeError as err:
        return None, f"{path}:{err.lineno}:{err.colno}: {err.msg}"


def _env(name, cast=str):
    raw = os.environ.get(f"FVP_{name}")
    if raw is None or raw == "":
        return None
    return cast(raw)


def _truthy(s):
    return s.strip().lower() in ("1", "true", "yes", "on")


def _parser():
    p = argparse.ArgumentParser(prog="parafvp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario")
    r.add_argument("config")
    r.add_argument("--out-dir")
    r.add_argument("--seed", type=int)
    r.add_argument("--svg", action="store_true", default=None)
    r.add_argument("--log-cap", type=float)
    v = sub.add_parser("validate", help="check a config and list findings")
    v.add_argument("config")
    v.add_argument("--seed", type=int)
    v.add_argument("--log-cap", type=float)
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    raw, err = _load(args.config)
    if err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    try:
        seed = args.seed if args.seed is not None else _env("SEED", int)
        log_cap = args.log_cap if args.log_cap is not None else _env("LOG_CAP", float)
    except ValueError as exc:
        print(f"environment override: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cfg = effective_config(raw, seed, log_cap) if isinstance(raw, dict) else raw
    findings = cfgmod.validate(cfg)
    if args.command == "validate":
        for f in findings:
            print(f"{args.config}: {f}")
        if not findings:
            print(f"{args.config}: ok")
        return EXIT_USAGE if findings else EXIT_OK
    if findings:
        for f in findings:
            print(f"{args.config}: {f}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = args.out_dir or _env("OUT_DIR") or cfg.get("outputs", {}).get("dir", ".")
    svg = args.svg if args.svg is not None else _truthy(_env("SVG") or "0")
    try:
        code, line = run(cfg, out_dir, svg)
    except FVPError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImportError as exc:
        print(f"--svg needs the optional plot extra ({exc.name} is missing)", file=sys.stderr)
        return EXIT_USAGE
    print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
