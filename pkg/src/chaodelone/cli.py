"""Command-line entry point.

Exit codes: 0 the command's contract holds, 1 malformed input, 2 a verified
violation (or a failed precondition on the data), 3 a budget ran out.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import chaos, cutproject, delone, euclid, io, render, surface
from .errors import (
    BudgetExceeded,
    ChaoDeloneError,
    NotFoundWithinBudget,
    ParamOrder,
    SchemaViolation,
)
from .policy import NumericPolicy

EXIT_OK, EXIT_MALFORMED, EXIT_VIOLATION, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_MALFORMED)


@dataclass
class RunConfig:
    command: str
    seed: int
    policy: NumericPolicy
    out: str | None
    args: argparse.Namespace


# ------------------------------------------------------------ parsing helpers

def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise argparse.ArgumentTypeError("need lo < hi")
    return lo, hi


def _boxes(text: str) -> tuple:
    """'lo1,lo2:hi1,hi2;...' -> boxes. An empty string is the empty union."""
    out = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        try:
            lo, hi = chunk.split(":")
            out.append(delone.Box(tuple(float(v) for v in lo.split(",")),
                                  tuple(float(v) for v in hi.split(","))))
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"bad box {chunk!r}: {e}") from e
    return tuple(out)


def _box(text: str) -> delone.Box:
    b = _boxes(text)
    if len(b) != 1:
        raise argparse.ArgumentTypeError("expected exactly one box")
    return b[0]


def _vector(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def _grid(text: str) -> tuple[int, int]:
    a, b = text.lower().split("x")
    return int(a), int(b)


# ------------------------------------------------------------ shared context

def _group(cfg: RunConfig):
    if getattr(cfg.args, "surface", None):
        g = io.load_surface(cfg.args.surface)
        return replace(g, policy=cfg.policy)
    return surface.standard_surface(cfg.policy)


def _rho(cfg: RunConfig, g) -> float:
    return cfg.args.rho if cfg.args.rho is not None else 0.95 * g.mu


def _tube(cfg: RunConfig, g) -> cutproject.TubeConfig:
    return cutproject.TubeConfig(_rho(cfg, g), cfg.args.mode, cfg.policy.boundary)


def _emit(cfg: RunConfig, doc: dict) -> None:
    text = io.dumps(doc)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(cfg: RunConfig, kind: str, data: dict, ok: bool, verdict: str | None = None) -> int:
    _emit(cfg, io.report_doc(kind, data, verdict or ("pass" if ok else "fail")))
    return EXIT_OK if ok else EXIT_VIOLATION


def _load_set(path):
    return io.load_pointset(path)


def _windowed(S) -> delone.WindowedPointSet:
    return delone.WindowedPointSet.from_projected(S) if isinstance(S, cutproject.ProjectedSet) else S


# ------------------------------------------------------------ commands

def cmd_surface_solve(cfg):
    g = _group(cfg)
    _emit(cfg, io.surface_doc(g))
    return EXIT_OK


def cmd_surface_validate(cfg):
    g = _group(cfg)
    residual = max(c.residual for c in g.vertex_cycles)
    angle_err = max(abs(c.angle_sum - 2 * math.pi) for c in g.vertex_cycles)
    sizes = sorted(len(c.vertices) for c in g.vertex_cycles)
    mu = surface.injectivity_radius(g)
    ok = residual < 1e-8 and angle_err < 1e-9 and sizes == [3, 3, 6]
    data = {"vertex_cycle_residuals": [c.residual for c in g.vertex_cycles],
            "angle_sums": [c.angle_sum for c in g.vertex_cycles],
            "orbit_sizes": sizes, "mu": mu, "mu_stored": g.mu,
            "side_lengths": g.polygon.side_lengths(), "area": g.polygon.triangulated_area()}
    return _report(cfg, "surface_validate", data, ok)


def cmd_orbit_ball(cfg):
    g = _group(cfg)
    orb = surface.ball_orbit(g, cfg.args.radius)
    d = np.sort(surface.dist_z(orb.points, g.base_point.z))
    data = {"radius": cfg.args.radius, "count": len(orb.points),
            "area_law": (math.cosh(cfg.args.radius) - 1) / 2,
            "nearest_nontrivial": float(d[1]) if len(d) > 1 else None}
    if cfg.args.points:
        data["points"] = [[float(z.real), float(z.imag)] for z in orb.points]
        data["word_lengths"] = [int(k) for k in orb.word_lengths]
    return _report(cfg, "orbit_ball", data, True)


def cmd_cutproject_run(cfg):
    g = _group(cfg)
    ell = surface.random_geodesic(g, cfg.seed)
    ps = cutproject.cut_project(g, ell, _tube(cfg, g), cfg.args.window)
    if cfg.args.merge is not None:
        ps = cutproject.merge_close_pairs(ps, cfg.args.merge)
    doc = io.pointset_doc(ps)
    doc["geodesic"] = {"seed": cfg.seed, "alpha": ell.alpha, "omega": ell.omega,
                       "anchor": [ell.anchor.x, ell.anchor.y]}
    _emit(cfg, doc)
    return EXIT_OK


def cmd_analyze_delone(cfg):
    S = _load_set(cfg.args.input)
    rep = delone.check_delone(S, cfg.args.eps, cfg.args.delta)
    return _report(cfg, "delone", {"epsilon": cfg.args.eps, "delta": cfg.args.delta, "report": rep},
                   rep.separated_ok and rep.dense_ok)


def cmd_analyze_periods(cfg):
    S = _load_set(cfg.args.input)
    r = cfg.args.r if cfg.args.r is not None else 10.0
    per = delone.find_periods(S, r, cfg.args.p_min, cfg.args.p_max)
    return _report(cfg, "periods", {"r": r, "p_min": cfg.args.p_min, "p_max": cfg.args.p_max,
                                    "periods": per}, True, "periodic" if per else "no_period")


def cmd_analyze_rubber(cfg):
    S, T = _load_set(cfg.args.input), _load_set(cfg.args.other)
    prox = delone.rubber_proximity(S, T, cfg.args.r_max)
    return _report(cfg, "rubber", {"r_max": cfg.args.r_max, "proximity": prox}, True)


def cmd_analyze_compose(cfg):
    a = cfg.args
    S1, S2, S3 = (_load_set(p) for p in a.sets)
    ok = delone.composition_check(a.A, a.B, a.C, a.D, S1, S2, S3)
    return _report(cfg, "compose", {"A": a.A, "B": a.B, "C": a.C, "D": a.D, "holds": ok}, ok)


def cmd_chaos_closed(cfg):
    g = _group(cfg)
    geos = chaos.enumerate_closed(g, cfg.args.cutoff, max_elements=cfg.policy.max_elements)
    data = {"cutoff": cfg.args.cutoff, "count": len(geos),
            "geodesics": [{"element": k.element, "length": k.length,
                           "alpha": k.axis.alpha, "omega": k.axis.omega} for k in geos]}
    return _report(cfg, "closed_geodesics", data, True)


def cmd_chaos_spectrum(cfg):
    g = _group(cfg)
    sp = chaos.length_spectrum(g, cfg.args.cutoff, max_elements=cfg.policy.max_elements)
    return _report(cfg, "length_spectrum", {"cutoff": sp.cutoff, "lengths": list(sp.lengths)}, True)


def cmd_chaos_dalbo(cfg):
    a = cfg.args
    if a.lengths:
        sp = chaos.LengthSpectrum(tuple(sorted(a.lengths)), max(a.lengths))
    else:
        sp = chaos.length_spectrum(_group(cfg), a.cutoff, max_elements=cfg.policy.max_elements)
    arith, omega = chaos.dalbo_check(sp, a.omega_min, a.tol)
    data = {"lengths": list(sp.lengths), "omega_min": a.omega_min, "tol": a.tol,
            "arithmetic_like": arith, "witness_omega": omega}
    return _report(cfg, "dalbo", data, True, "arithmetic_like" if arith else "not_arithmetic")


def cmd_chaos_approx(cfg):
    g = _group(cfg)
    ell = surface.random_geodesic(g, cfg.seed)
    r = cfg.args.r if cfg.args.r is not None else 1.0
    res = chaos.approx_by_closed(g, ell, r, _tube(cfg, g), max_word_length=cfg.args.max_word_length)
    data = {"seed": cfg.seed, "r": r, "rho": _rho(cfg, g), "verified": res.verified,
            "reversed_matched": res.reversed_matched, "word_length_bound": res.word_length,
            "element": res.k.element, "length": res.k.length,
            "axis": {"alpha": res.k.axis.alpha, "omega": res.k.axis.omega,
                     "anchor": [res.k.axis.anchor.x, res.k.axis.anchor.y]},
            "closing_times": list(res.times), "attempts": res.attempts, "window": list(res.window)}
    return _report(cfg, "approx", data, res.verified)


def cmd_chaos_match(cfg):
    g = _group(cfg)
    ell = surface.random_geodesic(g, cfg.seed)
    geos = chaos.enumerate_closed(g, cfg.args.cutoff)
    if not geos:
        raise ValueError("no closed geodesic below the cutoff")
    k = geos[cfg.args.index % len(geos)]
    lo, hi = cfg.args.window
    a, ok = chaos.translate_match(g, ell, k.axis, cfg.args.s, max(abs(lo), abs(hi)), _tube(cfg, g))
    data = {"seed": cfg.seed, "s": cfg.args.s, "target_length": k.length,
            "target": {"alpha": k.axis.alpha, "omega": k.axis.omega}, "a": a, "verified": ok}
    return _report(cfg, "translate_match", data, ok)


def cmd_chaos_tau(cfg):
    g = _group(cfg)
    est = chaos.tau_sup_estimate(g, _rho(cfg, g), cfg.args.grid, cfg.args.horizon, seed=cfg.seed)
    data = {"rho": _rho(cfg, g), "grid": list(cfg.args.grid), "horizon": est.horizon,
            "sup_estimate": est.sup_estimate, "tangency_suspects": est.tangency_suspects,
            "truncated": est.truncated, "samples": est.n_samples}
    return _report(cfg, "tau", data, est.truncated == 0, "bounded" if est.truncated == 0 else "truncated")


def cmd_chaos_conditions(cfg):
    g = _group(cfg)
    v = chaos.condition_check(g, _rho(cfg, g), cfg.args.grid, cfg.args.horizon, seed=cfg.seed)
    return _report(cfg, "conditions", {"verdict": v}, v.verdict == "pass", v.verdict)


def _region(boxes, ambient, dim):
    return euclid.Region(dim, boxes, ambient)


def _emit_set(cfg, S, extra: dict | None = None):
    doc = io.pointset_doc(S)
    doc["provenance"] = io.to_jsonable(getattr(S, "provenance", {}))
    if extra:
        doc.update(io.to_jsonable(extra))
    _emit(cfg, doc)
    return EXIT_OK


def cmd_euclid_complete(cfg):
    S = _windowed(_load_set(cfg.args.input))
    boxes = cfg.args.region or (S.window,)
    out = euclid.greedy_separated_complete(S, cfg.args.delta, _region(boxes, cfg.args.ambient, S.dim))
    return _emit_set(cfg, out)


def cmd_euclid_inner(cfg):
    S = _windowed(_load_set(cfg.args.input))
    A = _region(cfg.args.region, None, S.dim)
    return _emit_set(cfg, euclid.inner_extend(S, A, cfg.args.eps, cfg.args.delta))


def cmd_euclid_glue(cfg):
    N = _windowed(_load_set(cfg.args.input))
    amb = cfg.args.ambient or N.window
    A = _region(cfg.args.region, amb, N.dim)
    return _emit_set(cfg, euclid.glue_extend(N, A, amb, cfg.args.eps, cfg.args.delta))


def cmd_euclid_vq(cfg):
    a = cfg.args
    if a.input:
        S = _windowed(_load_set(a.input))
        ok, x = euclid.vq_member(S, euclid.VqParams(a.q, a.alpha))
        return _report(cfg, "vq_member", {"q": a.q, "alpha": a.alpha, "member": ok, "witness": x}, ok)
    S = euclid.vq_construct(a.q, a.alpha, a.eps, a.delta)
    ok, x = euclid.vq_member(S, euclid.VqParams(a.q, a.alpha))
    return _emit_set(cfg, S, {"member": ok, "witness": x})


def cmd_euclid_w(cfg):
    a = cfg.args
    S = _windowed(_load_set(a.input))
    L = a.grid_period or euclid.default_grid_period(a.m, *(S.params or (1.0, 1.0)))
    box = a.search_box or delone.Box.cube(L / 2, S.dim)
    ok, wit = euclid.w_member(S, a.m, a.m_prime, L, box)
    return _report(cfg, "w_member", {"m": a.m, "m_prime": a.m_prime, "grid_period": L,
                                     "member": ok, "witness": wit}, ok)


def cmd_euclid_chaotify(cfg):
    a = cfg.args
    S = _windowed(_load_set(a.input))
    S_hat, wit = euclid.chaotify(S, a.m, a.m_prime, a.l, a.eps, a.delta, a.grid_period)
    return _emit_set(cfg, S_hat, {"witness": wit})


def cmd_render(cfg):
    a = cfg.args
    if a.input:
        S = _load_set(a.input)
        if isinstance(S, cutproject.ProjectedSet):
            text = render.ticks_svg(S.coords, S.window, S.boundary_flags)
        elif S.dim == 1 and not S.is_torus:
            text = render.ticks_svg(S.points[:, 0], (S.window.lo[0], S.window.hi[0]))
        else:
            raise ValueError("tick plots need a one-dimensional set")
    elif a.empty:
        text = render.disk_svg(render.Scene())
    else:
        g = _group(cfg)
        ell = surface.random_geodesic(g, cfg.seed)
        lo, hi = a.window
        pts = surface.ball_orbit(g, a.orbit_radius).points if a.orbit_radius > 0 else np.zeros(0, complex)
        rho = None if a.no_tube else _rho(cfg, g)
        proj = cutproject.cut_project(g, ell, _tube(cfg, g), (lo, hi)).coords if rho else np.zeros(0)
        text = render.disk_svg(render.Scene(g, pts, ell, rho, (lo, hi), proj))
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rho", type=float, default=None, help="tube radius (default 0.95 mu)")
    common.add_argument("--window", type=_pair, default=(-50.0, 50.0), help="lo,hi")
    common.add_argument("--r", type=float, default=None)
    common.add_argument("--budget-elements", type=int, default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--surface", default=None, help="surface JSON (default: the standard 12-gon)")
    common.add_argument("--mode", default="plus_boundary", choices=cutproject.MODES)

    p = _Parser(prog="chaodelone", description="Cut-and-project Delone sets from hyperbolic surfaces.")
    top = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(parent, name, fn, **kw):
        q = parent.add_parser(name, parents=[common], **kw)
        q.set_defaults(fn=fn)
        return q

    s = top.add_parser("surface").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub(s, "solve", cmd_surface_solve)
    sub(s, "validate", cmd_surface_validate)

    o = top.add_parser("orbit").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = sub(o, "ball", cmd_orbit_ball)
    q.add_argument("--radius", type=float, default=5.0)
    q.add_argument("--points", action="store_true")

    c = top.add_parser("cutproject").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = sub(c, "run", cmd_cutproject_run)
    q.add_argument("--merge", type=float, default=None)

    an = top.add_parser("analyze").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = sub(an, "delone", cmd_analyze_delone)
    q.add_argument("input")
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q = sub(an, "periods", cmd_analyze_periods)
    q.add_argument("input")
    q.add_argument("--p-min", type=float, default=0.01)
    q.add_argument("--p-max", type=float, default=10.0)
    q = sub(an, "rubber", cmd_analyze_rubber)
    q.add_argument("input")
    q.add_argument("other")
    q.add_argument("--r-max", type=float, default=20.0)
    q = sub(an, "compose", cmd_analyze_compose)
    q.add_argument("sets", nargs=3)
    for name in "ABCD":
        q.add_argument(f"--{name}", type=_box, required=True)

    ch = top.add_parser("chaos").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = sub(ch, "closed", cmd_chaos_closed)
    q.add_argument("--cutoff", type=float, default=5.0)
    q = sub(ch, "spectrum", cmd_chaos_spectrum)
    q.add_argument("--cutoff", type=float, default=8.0)
    q = sub(ch, "dalbo", cmd_chaos_dalbo)
    q.add_argument("--cutoff", type=float, default=8.0)
    q.add_argument("--lengths", type=_vector, default=None)
    q.add_argument("--omega-min", type=float, default=0.01)
    q.add_argument("--tol", type=float, default=1e-6)
    q = sub(ch, "approx", cmd_chaos_approx)
    q.add_argument("--max-word-length", type=int, default=12)
    q = sub(ch, "match", cmd_chaos_match)
    q.add_argument("--s", type=float, default=2.0)
    q.add_argument("--cutoff", type=float, default=5.0)
    q.add_argument("--index", type=int, default=0)
    for name, fn in (("tau", cmd_chaos_tau), ("conditions", cmd_chaos_conditions)):
        q = sub(ch, name, fn)
        q.add_argument("--grid", type=_grid, default=(16, 16), help="BxD")
        q.add_argument("--horizon", type=float, default=40.0)

    eu = top.add_parser("euclid").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = sub(eu, "complete", cmd_euclid_complete)
    q.add_argument("input")
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--region", type=_boxes, default=())
    q.add_argument("--ambient", type=_box, default=None)
    q = sub(eu, "inner", cmd_euclid_inner)
    q.add_argument("input")
    q.add_argument("--region", type=_boxes, required=True)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q = sub(eu, "glue", cmd_euclid_glue)
    q.add_argument("input")
    q.add_argument("--region", type=_boxes, default=())
    q.add_argument("--ambient", type=_box, default=None)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q = sub(eu, "vq", cmd_euclid_vq)
    q.add_argument("--input", default=None, help="test membership instead of constructing")
    q.add_argument("--q", type=_vector, required=True)
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--eps", type=float, default=1.0)
    q.add_argument("--delta", type=float, default=1.0)
    q = sub(eu, "w", cmd_euclid_w)
    q.add_argument("input")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--m-prime", type=int, required=True)
    q.add_argument("--grid-period", type=float, default=None)
    q.add_argument("--search-box", type=_box, default=None)
    q = sub(eu, "chaotify", cmd_euclid_chaotify)
    q.add_argument("input")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--m-prime", type=int, required=True)
    q.add_argument("--l", type=float, required=True)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--grid-period", type=float, default=None)

    q = top.add_parser("render", parents=[common])
    q.set_defaults(fn=cmd_render)
    q.add_argument("--input", default=None, help="pointset JSON for a tick plot")
    q.add_argument("--orbit-radius", type=float, default=4.0)
    q.add_argument("--no-tube", action="store_true")
    q.add_argument("--empty", action="store_true")
    return p


def _glue_negative_values(argv: list) -> list:
    """'--window -5,5' -> '--window=-5,5' so argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--") and "=" not in a and i + 1 < len(argv) \
                and len(argv[i + 1]) > 1 and argv[i + 1][0] == "-" and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        policy = NumericPolicy.from_env()
    except (ValueError, TypeError) as e:
        print(f"error: numeric policy override: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    if args.budget_elements is not None:
        if args.budget_elements < 1:
            print("error: --budget-elements must be positive", file=sys.stderr)
            return EXIT_MALFORMED
        policy = replace(policy, max_elements=args.budget_elements)
    cfg = RunConfig(f"{args.group} {getattr(args, 'cmd', '')}".strip(), args.seed, policy, args.out, args)
    try:
        return args.fn(cfg)
    except (BudgetExceeded, NotFoundWithinBudget) as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (SchemaViolation, ParamOrder, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except ChaoDeloneError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
