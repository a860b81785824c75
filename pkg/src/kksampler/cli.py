"""Command-line experiment driver.

Subcommands
    synthesize  build a kernel of prescribed approximation order (JSON)
    verify      strict compatibility + moment defects of a pair (JSON)
    converge    convergence-rate run: CSV + JSON summary + figure
    reproduce   band-limited exact-reproduction check (CSV + JSON)
    compare     cell-average vs point-sample series with jitter (CSV + figure)

Configs are flat UTF-8 ``key = value`` text with ``[section]`` headers; keys
are addressed as ``section.key``.  Identical configs give byte-identical CSV:
iteration orders are fixed and floats are written with repr (shortest
round-trip decimals).  Exit status: 0 pass, 2 acceptance failure, 1 error.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import __version__
from .analysis import ConvergenceReport, lp_distance, modulus_of_smoothness
from .corpus import get_function
from .dilation import new_dilation
from .kernels import (BallIndicator, BochnerRiesz, BoxIndicator, SincAverager,
                      SincSquared, averager_to_json, kernel_to_json,
                      plain_sinc)
from .operators import (EvalGrid, TruncationPolicy, generalized_sampling,
                        kantorovich_1d, quasi_projection)
from .quadrature import QuadratureSpec
from .synthesis import (SynthesisError, check_strict_compatibility,
                        moment_defect, shifted_combo_averager,
                        synthesize_kernel)

# reference coefficient sets for the classic box syntheses (shift -> value)
REFERENCE_COEFFS = {
    ("box", 1, 4): {(0,): 11.0 / 12.0, (1,): 5.0 / 24.0,
                    (2,): -1.0 / 6.0, (3,): 1.0 / 24.0},
    ("box", 2, 4): {(0, 0): 5.0 / 6.0},
}


class ConfigError(ValueError):
    pass


# ----------------------------------------------------------------------------
# config parsing

def parse_config(path):
    """Flat key = value pairs under [section] headers -> {'section.key': str}."""
    cfg = {}
    section = ""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                continue
            if "=" not in line:
                raise ConfigError("%s:%d: expected 'key = value', got %r"
                                  % (path, lineno, raw.rstrip()))
            key, val = line.split("=", 1)
            full = (section + "." if section else "") + key.strip()
            if full in cfg:
                raise ConfigError("%s:%d: duplicate key %r"
                                  % (path, lineno, full))
            cfg[full] = val.strip()
    return cfg


class Resolved:
    """Config access with typed getters; records every resolved value so the
    CSV header can reproduce the full effective configuration."""

    def __init__(self, cfg):
        self.cfg = dict(cfg)
        self.used = {}

    def _fetch(self, key, default, required):
        if key in self.cfg:
            return self.cfg[key]
        if required:
            raise ConfigError("missing required config key %r" % key)
        return default

    def get_str(self, key, default=None, required=False, choices=None):
        val = self._fetch(key, default, required)
        if choices and val not in choices:
            raise ConfigError("key %r: %r not one of %s"
                              % (key, val, sorted(choices)))
        self.used[key] = val
        return val

    def get_int(self, key, default=None, required=False):
        val = self._fetch(key, default, required)
        try:
            out = int(val)
        except (TypeError, ValueError):
            raise ConfigError("key %r: expected integer, got %r" % (key, val))
        self.used[key] = out
        return out

    def get_float(self, key, default=None, required=False):
        val = self._fetch(key, default, required)
        try:
            out = float(val)
        except (TypeError, ValueError):
            raise ConfigError("key %r: expected real, got %r" % (key, val))
        self.used[key] = out
        return out

    def get_floats(self, key, default=None, required=False):
        val = self._fetch(key, default, required)
        if isinstance(val, str):
            try:
                out = [float(t) for t in val.replace(",", " ").split()]
            except ValueError:
                raise ConfigError("key %r: expected list of reals, got %r"
                                  % (key, val))
        else:
            out = list(val or [])
        self.used[key] = " ".join(repr(v) for v in out)
        return out

    def header_lines(self):
        lines = ["kksampler %s" % __version__]
        for key in sorted(self.used):
            lines.append("%s = %s" % (key, self.used[key]))
        return lines


# ----------------------------------------------------------------------------
# object construction from config

def build_matrix(res):
    dim = res.get_int("matrix.dim", 1)
    entries = res.get_floats("matrix.entries", [2.0] if dim == 1 else None,
                             required=dim != 1)
    if len(entries) != dim * dim:
        raise ConfigError("matrix.entries: need %d row-major values, got %d"
                          % (dim * dim, len(entries)))
    return new_dilation(np.array(entries).reshape(dim, dim))


def build_averager(res, dim):
    variant = res.get_str("averager.variant", "box",
                          choices={"box", "ball", "sinc"})
    if variant == "box":
        lo = res.get_floats("averager.lo", [-0.5] * dim)
        hi = res.get_floats("averager.hi", [0.5] * dim)
        if len(lo) != dim or len(hi) != dim:
            raise ConfigError("averager.lo/hi must have %d entries" % dim)
        return BoxIndicator(lo, hi)
    if variant == "ball":
        return BallIndicator(res.get_float("averager.radius", 1.0), dim)
    return SincAverager(dim)


def build_kernel(res, dim, averager):
    variant = res.get_str("kernel.variant", "sinc",
                          choices={"sinc", "sinc_squared", "bochner_riesz",
                                   "synthesized"})
    if variant == "sinc":
        return plain_sinc(dim)
    if variant == "sinc_squared":
        return SincSquared(dim)
    if variant == "bochner_riesz":
        return BochnerRiesz(res.get_float("kernel.delta", 1.0), dim)
    order = res.get_int("kernel.order", 4)
    return synthesize_kernel(averager, order)


def maybe_shifted(res, kernel, averager):
    order = res.get_int("averager.shift_order", 0)
    if order > 0:
        return shifted_combo_averager(kernel, averager, order)
    return averager


def build_grid(res, dim):
    window = res.get_floats("grid.window", [-4.0, 4.0] * dim)
    if len(window) != 2 * dim:
        raise ConfigError("grid.window: need %d values (lo hi per axis)"
                          % (2 * dim))
    pts = res.get_int("grid.points_per_axis", 513)
    return EvalGrid(tuple((window[2 * i], window[2 * i + 1])
                          for i in range(dim)), pts)


def build_quadrature(res):
    return QuadratureSpec(
        nodes_per_axis=res.get_int("quadrature.nodes_per_axis", 24),
        subdivisions=res.get_int("quadrature.subdivisions", 2),
        radial_nodes=res.get_int("quadrature.radial_nodes", 32),
        angular_nodes=res.get_int("quadrature.angular_nodes", 64))


def build_truncation(res):
    return TruncationPolicy(
        mode=res.get_str("truncation.mode", "radius",
                         choices={"radius", "tail_tol"}),
        radius=res.get_float("truncation.radius", 64.0),
        tail_tol=res.get_float("truncation.tail_tol", 1e-9))


def get_p(res):
    raw = res.get_str("run.p", "2")
    if raw in ("inf", "Inf", "INF"):
        return math.inf
    try:
        return float(raw)
    except ValueError:
        raise ConfigError("run.p: expected real >= 1 or 'inf', got %r" % raw)


def pool_map(fn, items, threads):
    """Map preserving item order; threads = 0 means one per CPU."""
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def write_text(out_dir, name, text):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def write_json(out_dir, name, doc):
    return write_text(out_dir, name, json.dumps(doc, indent=2,
                                               sort_keys=True) + "\n")


def pointwise_csv(res, xs, values, reference):
    """CSV with columns x..., value, reference, abs_error."""
    dim = xs.shape[1]
    lines = ["# " + h for h in res.header_lines()]
    lines.append(",".join(["x%d" % i for i in range(dim)]
                          + ["value", "reference", "abs_error"]))
    for x, v, r in zip(xs, values, reference):
        cells = [repr(float(c)) for c in x]
        cells += [repr(float(v)), repr(float(r)), repr(abs(float(v - r)))]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# subcommands

def cmd_synthesize(res, out_dir, threads):
    M_dim = res.get_int("matrix.dim", 1)
    averager = build_averager(res, M_dim)
    order = res.get_int("synthesis.order", 4)
    kernel = synthesize_kernel(averager, order)
    defect_n = moment_defect(kernel, averager, order)
    defect_n1 = moment_defect(kernel, averager, order + 1)
    coeffs = [{"shift": list(l), "re": b.real, "im": b.imag}
              for l, b in sorted(kernel.T.coeffs.items())]
    doc = {
        "averager": json.loads(averager_to_json(averager)),
        "order": order,
        "coefficients": coeffs,
        "defect_at_order": defect_n,
        "defect_at_order_plus_1": defect_n1,
        "kernel": json.loads(kernel_to_json(kernel)),
    }
    key = (res.used.get("averager.variant", "box"), M_dim, order)
    ref = REFERENCE_COEFFS.get(key)
    if ref is not None:
        doc["reference_comparison"] = [
            {"shift": list(l), "reference": v,
             "computed": kernel.T.coeffs.get(l, 0.0 + 0.0j).real,
             "abs_diff": abs(kernel.T.coeffs.get(l, 0.0 + 0.0j) - v)}
            for l, v in sorted(ref.items())]
    write_json(out_dir, "synthesize.json", doc)
    return 0 if defect_n < 1e-8 else 2


def cmd_verify(res, out_dir, threads):
    dim = res.get_int("matrix.dim", 1)
    averager = build_averager(res, dim)
    kernel = build_kernel(res, dim, averager)
    averager = maybe_shifted(res, kernel, averager)
    deltas = res.get_floats("verify.deltas", [0.1, 0.2, 0.3, 0.4, 0.45])
    compat = {repr(d): bool(check_strict_compatibility(kernel, averager, d))
              for d in deltas}
    defects = {}
    for n in range(1, 7):
        try:
            defects[str(n)] = moment_defect(kernel, averager, n)
        except (NotImplementedError, ValueError) as exc:
            defects[str(n)] = "unavailable: %s" % exc
    doc = {
        "kernel": json.loads(kernel_to_json(kernel)),
        "averager": json.loads(averager_to_json(averager)),
        "strictly_compatible": compat,
        "moment_defects": defects,
        "decay_class": kernel.decay_class,
    }
    status = 0
    require = res.get_int("verify.require_order", 0)
    if require > 0:
        d = defects.get(str(require))
        ok = isinstance(d, float) and d < 1e-8
        doc["required_order"] = require
        doc["required_order_pass"] = bool(ok)
        status = 0 if ok else 2
    write_json(out_dir, "verify.json", doc)
    return status


def cmd_converge(res, out_dir, threads):
    M = build_matrix(res)
    dim = M.dim
    f = get_function(res.get_str("run.function", required=True))
    if f.dim != dim:
        raise ConfigError("function %r is %d-dimensional but matrix.dim = %d"
                          % (f.id, f.dim, dim))
    averager = build_averager(res, dim)
    kernel = build_kernel(res, dim, averager)
    averager = maybe_shifted(res, kernel, averager)
    grid = build_grid(res, dim)
    qspec = build_quadrature(res)
    trunc = build_truncation(res)
    p = get_p(res)
    j_min = res.get_int("run.j_min", 3)
    j_max = res.get_int("run.j_max", 7)
    n_mod = res.get_int("run.modulus_order", 1)
    floor = res.get_float("run.error_floor", 0.0)
    mod_pts = res.get_int("run.modulus_points", 4097)
    reference = np.asarray(f(grid.points)).reshape(grid.shape)

    def level(j):
        result = quasi_projection(f, kernel, averager, M, j, grid, trunc,
                                  qspec)
        err = lp_distance(result.values, reference, grid.spacing, p)
        scale = M.inv_power_norm(j)
        mod = modulus_of_smoothness(f, n_mod, scale, p, grid.window,
                                    points_per_axis=mod_pts)
        return scale, err, mod

    rows = pool_map(level, list(range(j_min, j_max + 1)), threads)
    report = ConvergenceReport(error_floor=floor)
    for j, (scale, err, mod) in zip(range(j_min, j_max + 1), rows):
        report.add(j, scale, err, mod)
    report.finalize()

    write_text(out_dir, "converge.csv",
               report.to_csv(header_lines=res.header_lines()))
    summary = {"fitted_order": report.fitted_order,
               "constant_C": report.constant_C,
               "budget": {"error_floor": floor,
                          "truncation_radius": trunc.radius,
                          "quadrature_nodes": qspec.nodes_per_axis}}
    status = 0
    expected = res.get_float("acceptance.expected_order", 0.0)
    tol = res.get_float("acceptance.order_tol", 0.0)
    if tol > 0.0:
        ok = abs(report.fitted_order - expected) <= tol
        summary["expected_order"] = expected
        summary["order_tol"] = tol
        summary["order_pass"] = bool(ok)
        status = 0 if ok else 2
    write_json(out_dir, "converge.json", summary)

    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    scales = [r["scale"] for r in report.rows]
    errs = [r["lp_error"] for r in report.rows]
    ax.loglog(scales, errs, "o-", base=2, label="L_%s error" % res.used["run.p"])
    mods = [r["modulus_bound"] for r in report.rows]
    if all(m > 0 for m in mods):
        ax.loglog(scales, [report.constant_C * m for m in mods], "s--",
                  base=2, label="C * modulus bound")
    ax.set_xlabel("scale $\\|M^{-j}\\|$")
    ax.set_ylabel("error")
    ax.set_title("%s: fitted order %.3f" % (f.id, report.fitted_order))
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "converge.png"), dpi=120)
    plt.close(fig)
    return status


def cmd_reproduce(res, out_dir, threads):
    M = build_matrix(res)
    dim = M.dim
    f = get_function(res.get_str("run.function", "bump_bl"))
    if f.dim != dim:
        raise ConfigError("function %r is %d-dimensional but matrix.dim = %d"
                          % (f.id, f.dim, dim))
    averager = build_averager(res, dim)
    kernel = build_kernel(res, dim, averager)
    grid = build_grid(res, dim)
    qspec = build_quadrature(res)
    trunc = build_truncation(res)
    j = res.get_int("run.j", 1)
    budget = res.get_float("acceptance.max_error", 1e-6)

    result = quasi_projection(f, kernel, averager, M, j, grid, trunc, qspec)
    reference = np.asarray(f(grid.points)).reshape(grid.shape)
    max_err = float(np.max(np.abs(result.values - reference)))

    write_text(out_dir, "reproduce.csv",
               pointwise_csv(res, grid.points, result.values.reshape(-1),
                             reference.reshape(-1)))
    band_ok = f.band_limit is not None
    doc = {"function": f.id, "j": j, "max_abs_error": max_err,
           "budget": budget, "band_limited_hypothesis": band_ok,
           "pass": bool(band_ok and max_err < budget)}
    write_json(out_dir, "reproduce.json", doc)
    if not band_ok:
        # hypothesis violation is informational, not an acceptance failure
        return 0
    return 0 if max_err < budget else 2


def cmd_compare(res, out_dir, threads):
    f = get_function(res.get_str("run.function", "chi01"))
    if f.dim != 1:
        raise ConfigError("compare is one-dimensional; %r is %d-d"
                          % (f.id, f.dim))
    averager = build_averager(res, 1)
    kernel = build_kernel(res, 1, averager)
    grid = build_grid(res, 1)
    qspec = build_quadrature(res)
    trunc = build_truncation(res)
    p = get_p(res)
    ws = res.get_floats("run.w_list", [4.0, 8.0, 16.0, 32.0])
    jitter = res.get_float("run.jitter", 1e-3)
    reference = np.asarray(f(grid.points)).reshape(grid.shape)

    def at_w(w):
        kw = kantorovich_1d(f, w, kernel, grid, trunc, qspec).values
        sw = generalized_sampling(f, w, kernel, grid, trunc).values
        sw_j = generalized_sampling(f, w, kernel, grid, trunc,
                                    jitter=jitter / w).values

        # jittered cell averages: shift the signal by the same offset
        def shifted(x):
            return f(np.asarray(x) - jitter / w)
        shifted.antiderivative = (
            (lambda t: f.antiderivative(np.asarray(t) - jitter / w))
            if f.antiderivative is not None else None)
        kw_j = kantorovich_1d(shifted, w, kernel, grid, trunc, qspec).values
        return {
            "w": w,
            "kw_error": lp_distance(kw, reference, grid.spacing, p),
            "sw_error": lp_distance(sw, reference, grid.spacing, p),
            "kw_jitter_delta": lp_distance(kw_j, kw, grid.spacing, p),
            "sw_jitter_delta": lp_distance(sw_j, sw, grid.spacing, p),
            "kw": kw, "sw": sw,
        }

    runs = pool_map(at_w, ws, threads)
    last = runs[-1]
    write_text(out_dir, "compare_kantorovich.csv",
               pointwise_csv(res, grid.points, last["kw"].reshape(-1),
                             reference.reshape(-1)))
    write_text(out_dir, "compare_sampling.csv",
               pointwise_csv(res, grid.points, last["sw"].reshape(-1),
                             reference.reshape(-1)))
    summary = {"function": f.id, "p": res.used["run.p"], "jitter": jitter,
               "rows": [{k: r[k] for k in ("w", "kw_error", "sw_error",
                                           "kw_jitter_delta",
                                           "sw_jitter_delta")}
                        for r in runs]}
    write_json(out_dir, "compare.json", summary)

    fig, axes = plt.subplots(1, 2, figsize=(10, 4.0))
    x = grid.points[:, 0]
    axes[0].plot(x, reference.reshape(-1), "k-", lw=1, label=f.id)
    axes[0].plot(x, last["kw"].reshape(-1), label="cell averages, w=%g"
                 % last["w"])
    axes[0].plot(x, last["sw"].reshape(-1), "--", label="point samples")
    axes[0].set_title("reconstructions")
    axes[0].legend(fontsize=8)
    axes[1].loglog(ws, [r["kw_error"] for r in runs], "o-", base=2,
                   label="cell-average error")
    axes[1].loglog(ws, [r["sw_error"] for r in runs], "s--", base=2,
                   label="point-sample error")
    axes[1].loglog(ws, [r["kw_jitter_delta"] for r in runs], "o:", base=2,
                   label="cell-average jitter shift")
    axes[1].loglog(ws, [r["sw_jitter_delta"] for r in runs], "s:", base=2,
                   label="point-sample jitter shift")
    axes[1].set_xlabel("w")
    axes[1].set_title("errors and jitter sensitivity")
    axes[1].legend(fontsize=8)
    axes[1].grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "compare.png"), dpi=120)
    plt.close(fig)
    return 0


COMMANDS = {
    "synthesize": cmd_synthesize,
    "verify": cmd_verify,
    "converge": cmd_converge,
    "reproduce": cmd_reproduce,
    "compare": cmd_compare,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="kksampler",
        description="Sampling-operator synthesis and convergence benchmarks.")
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, metavar="PATH",
                        help="flat key = value config file")
    parser.add_argument("--out", default=".", metavar="DIR",
                        help="output directory (default: current)")
    parser.add_argument("--threads", type=int, default=1, metavar="N",
                        help="worker threads; 0 means one per CPU")
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        res = Resolved(cfg)
        return COMMANDS[args.subcommand](res, args.out, args.threads)
    except (ConfigError, SynthesisError, ValueError, OSError,
            NotImplementedError, KeyError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
