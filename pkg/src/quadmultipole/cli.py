"""
Command line front end.

Every command prints one JSON document (``--json``) or a short text report.
Exit status is 0 on success, 1 on a domain error (reported as JSON with
``code``, ``message`` and ``witness``) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import conic, harmonic, maxwell, moduli, parcelling, poly, quadform, quadrature, sylvester
from .errors import QMError

SCHEMA = 1
DEFAULT_SEED = 0
SEED_ENV = "QM_SEED"


@dataclass
class RunConfig:
    command: str | None
    quadform: object
    seed: int
    cluster_tol: float
    div_tol: float
    rank_tol: float
    output: str

    def to_json(self):
        out = asdict(self)
        if not isinstance(self.quadform, str):
            out["quadform"] = quadform.quadform_new(self.quadform).to_json()
        out["defaults"] = {
            "cluster_tol": conic.CLUSTER_TOL,
            "merge_radius": conic.MERGE_RADIUS,
            "zero_form_tol": conic.ZERO_FORM_TOL,
            "div_tol": poly.DIV_TOL,
            "rank_tol": moduli.RANK_TOL,
            "cond_limit": harmonic.COND_LIMIT,
            "max_enum_weight": parcelling.MAX_ENUM_WEIGHT,
            "max_fiber_weight": moduli.MAX_FIBER_WEIGHT,
            "maxwell_fit_tol": maxwell.FIT_TOL,
            "seed": DEFAULT_SEED,
            "seed_env": SEED_ENV,
        }
        return out


class UsageError(Exception):
    pass


# ==========================
# JSON helpers
# ==========================

def cnum(z):
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def cvec(v):
    return [cnum(c) for c in v]


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (complex, np.complexfloating)):
        return cnum(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "to_json"):
        return o.to_json()
    return str(o)


def dump(doc):
    return json.dumps(doc, sort_keys=True, indent=2, default=_default)


def _parse_number(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise UsageError("complex numbers are written as [re, im]")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace("i", "j"))
    return complex(x)


def parse_vectors(text, width=3):
    """A JSON list of vectors; entries are numbers or ``[re, im]`` pairs."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None
    if data and not isinstance(data[0], list):
        data = [data]
    out = []
    for v in data:
        if len(v) != width:
            raise UsageError(f"expected vectors of length {width}")
        out.append(np.array([_parse_number(c) for c in v], dtype=np.complex128))
    return out


def parse_ints(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None


def _poly(text):
    return poly.parse_poly(text)


# ==========================
# Commands
# ==========================

def cmd_decompose(args, cfg, rng):
    Q = quadform.quadform_new(cfg.quadform)
    p = _poly(args.poly)
    if args.enumerate:
        h = p.homogeneous()
        found = sylvester.enumerate_decompositions(h, Q, cap=args.cap, rng=rng,
                                                   cluster_tol=cfg.cluster_tol,
                                                   with_parcellings=True)
        dists = []
        for m, parc in found:
            _, r = sylvester.leading_multipole(h, Q, parc, rng=rng, cluster_tol=cfg.cluster_tol)
            dists.append((h - m.expand() - Q.hpoly * r).norm() / max(h.norm(), 1e-300))
        doc = {
            "surface": Q.to_json(),
            "count": len(found),
            "multipoles": [dict(m.to_json(), parcelling=pc.to_json(), certificate=float(d))
                           for (m, pc), d in zip(found, dists)],
        }
        text = [f"{len(found)} distinct leading multipoles"]
        return doc, text
    policy = {"real": "canonical_real", "complex": "canonical_complex"}[args.policy]
    dec = sylvester.decompose(p, Q, policy=policy, rng=rng, cluster_tol=cfg.cluster_tol)
    resid = dec.residual(p, n=200, rng=rng)
    doc = dec.to_json(residual=resid)
    text = [f"surface Q = {poly.format_poly(Q.hpoly)}"]
    for w in dec.multipoles:
        text.append(f"  degree {w.degree}: lambda = {_fmt_c(w.lam)}, "
                    + ", ".join("(" + ", ".join(_fmt_c(c) for c in v) + ")" for v in w.vectors))
    text.append(f"residual {resid:.3e}")
    return doc, text


def _fmt_c(z):
    z = complex(z)
    z = complex(z.real + 0.0, z.imag + 0.0)
    if abs(z.imag) < 1e-14:
        return f"{z.real:.10g}"
    return f"({z.real:.10g}{z.imag:+.10g}i)"


def cmd_harmonics(args, cfg, rng):
    Q = quadform.quadform_new(cfg.quadform)
    h = _poly(args.poly).homogeneous()
    dec = harmonic.harmonic_decompose(h, Q)
    lap = dec.laplacian_residuals()
    resum = (dec.resum() - h).norm() / max(h.norm(), 1e-300)
    doc = {
        "surface": Q.to_json(),
        "components": [{"degree": f.degree, "q_power": i, "poly": poly.format_poly(f),
                        "laplacian_residual": lap[i]}
                       for i, f in enumerate(dec.components)],
        "resum_residual": resum,
    }
    text = [f"Q^{i} * [{poly.format_poly(f)}]" for i, f in enumerate(dec.components)]
    text.append(f"resum residual {resum:.3e}")
    return doc, text


def cmd_dirichlet(args, cfg, rng):
    Q = quadform.quadform_new(cfg.quadform)
    M, N = _poly(args.lap), _poly(args.boundary)
    P = harmonic.dirichlet_solve(M, N, Q, order=args.order)
    lap, surf, scale = harmonic.dirichlet_residuals(P, M, N, Q, rng=rng)
    doc = {"surface": Q.to_json(), "solution": poly.format_poly(P), "order": args.order,
           "laplacian_residual": lap, "surface_residual": surf, "scale": scale}
    return doc, [f"P = {poly.format_poly(P)}",
                 f"laplacian residual {lap:.3e}, surface residual {surf:.3e}"]


def cmd_maxwell(args, cfg, rng):
    Q = quadform.quadform_new(cfg.quadform)
    if args.apply is not None:
        dirs = parse_vectors(args.apply) if args.apply.strip() not in ("", "[]") else []
        N = maxwell.maxwell_apply(Q, dirs)
        lap = quadform.laplacian_q(Q, N).norm() if N.degree >= 2 else 0.0
        doc = {"surface": Q.to_json(), "directions": [cvec(u) for u in dirs],
               "poly": poly.format_poly(N), "laplacian_residual": lap}
        return doc, [poly.format_poly(N)]
    if args.represent is None:
        raise UsageError("maxwell needs --apply or --represent")
    h = _poly(args.represent).homogeneous()
    dirs, lam, parc = maxwell.maxwell_from_harmonic(h, Q, rng=rng, return_parcelling=True)
    N = maxwell.maxwell_apply(Q, dirs)
    dist = (N * lam - h).norm() / max(h.norm(), 1e-300)
    doc = {"surface": Q.to_json(), "directions": [cvec(u) for u in dirs], "lambda": cnum(lam),
           "certificate": dist, "parcelling": None if parc is None else parc.to_json()}
    return doc, [f"lambda = {_fmt_c(lam)}"] + [
        "u = (" + ", ".join(_fmt_c(c) for c in u) + ")" for u in dirs] + [
        f"relative distance {dist:.3e}"]


def cmd_parcellings(args, cfg, rng):
    mu = parse_ints(args.mults)
    n = parcelling.count_parcellings(mu)
    doc = {"multiplicities": mu, "count": n}
    if args.count_only:
        return doc, [str(n)]
    items = parcelling.enumerate_parcellings(mu)
    doc["parcellings"] = [p.to_json() for p in items]
    return doc, [str(n)] + [p.encode() for p in items]


def cmd_ramified(args, cfg, rng):
    Q = quadform.quadform_new(cfg.quadform)
    res = moduli.is_ramified(parse_vectors(args.lines), Q, cfg.cluster_tol)
    doc = dict(res.to_json(), surface=Q.to_json())
    text = ["ramified" if res.ramified else "unramified"]
    if res.witness is not None:
        text.append(f"multiple point [{_fmt_c(res.witness.u0)} : {_fmt_c(res.witness.u1)}]")
    return doc, text


def cmd_nullity(args, cfg, rng):
    Q = quadform.quadform_new(cfg.quadform)
    lines = parse_vectors(args.lines)
    k = moduli.tangent_nullity(lines, Q, rng=rng)
    ram = moduli.is_ramified(lines, Q, cfg.cluster_tol)
    doc = {"surface": Q.to_json(), "nullity": k, "ramified": ram.ramified,
           "consistent": (k > 0) == ram.ramified}
    return doc, [str(k)]


def cmd_gamma_fibers(args, cfg, rng):
    Q = quadform.quadform_new(cfg.quadform)
    if args.center is not None:
        point = parse_vectors(args.center)[0]
    else:
        point = rng.normal(size=3) + 1j * rng.normal(size=3)
    center = moduli.PencilCenter.of(point, Q)
    if args.target is not None:
        try:
            items = json.loads(args.target)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON: {exc}") from None
        pts = []
        for it in items:
            s = [_parse_number(c) for c in it["s"]]
            pts.append((conic.ProjPoint.of(*s), int(it.get("mult", 1))))
        target = moduli.PencilDivisor.collect(pts, cfg.cluster_tol)
    else:
        d = args.random_degree
        pts = [(conic.ProjPoint.of(rng.normal(size=2) + 1j * rng.normal(size=2)), 1)
               for _ in range(d)]
        target = moduli.PencilDivisor.collect(pts, cfg.cluster_tol)
    fiber = moduli.gamma_fiber(target, center, Q, cfg.cluster_tol)
    back = [moduli.gamma_project(div, center, Q, cfg.cluster_tol) for div in fiber]
    ok = all(len(b.points) == len(target.points) and all(
        m == n and conic.chordal(a, c) <= 1e-6
        for (a, m), (c, n) in zip(b.points, target.points)) for b in back)
    doc = {"surface": Q.to_json(), "center": cvec(center.point), "target": target.to_json(),
           "count": len(fiber), "fiber": [div.to_json() for div in fiber],
           "projects_back": ok}
    return doc, [f"fiber size {len(fiber)}"]


def cmd_dims(args, cfg, rng):
    doc, text = {}, []
    if args.partition is not None:
        part = parse_ints(args.partition)
        val = moduli.dim_defect(args.quadform_degree, part)
        doc.update({"quadform_degree": args.quadform_degree, "partition": part,
                    "defect": str(val), "defect_value": float(val)})
        text.append(f"defect {val}")
    if args.degree is not None:
        Q = quadform.quadform_new(cfg.quadform)
        d = args.degree
        doc.update({"degree": d, "dim": poly.n_monomials(d),
                    "corank": moduli.multiplication_corank(Q, d, cfg.rank_tol),
                    "expected_corank": 2 * d + 1})
        text.append(f"dim V({d}) = {poly.n_monomials(d)}, corank of Q-multiplication "
                    f"{doc['corank']}")
    if not doc:
        raise UsageError("dims needs --partition or --degree")
    return doc, text


def cmd_fourier(args, cfg, rng):
    Q = quadform.quadform_new(cfg.quadform)
    if args.poly is not None:
        f = _poly(args.poly)
        res = quadrature.fourier_components(f, Q, kmax=args.kmax, order=args.order)
        source = "poly"
    elif args.csv is not None:
        th, ph, vals = [], [], []
        with open(args.csv, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    a, b, c = (float(x) for x in row[:3])
                except ValueError:
                    continue  # header
                th.append(a)
                ph.append(b)
                vals.append(c)
        if args.kmax is None:
            raise UsageError("--csv needs --kmax")
        res = quadrature.fourier_from_samples(th, ph, vals, Q, args.kmax)
        source = "csv"
    else:
        raise UsageError("fourier needs --poly or --csv")
    doc = dict(res.to_json(), surface=Q.to_json(), source=source,
               relative_parseval_residual=res.relative_residual)
    text = [f"f_{f.degree} = {poly.format_poly(f)}" for f in res.components]
    text.append(f"parseval residual {res.parseval_residual:.3e}")
    return doc, text


COMMANDS = {
    "decompose": cmd_decompose,
    "harmonics": cmd_harmonics,
    "dirichlet": cmd_dirichlet,
    "maxwell": cmd_maxwell,
    "parcellings": cmd_parcellings,
    "ramified": cmd_ramified,
    "nullity": cmd_nullity,
    "gamma-fibers": cmd_gamma_fibers,
    "dims": cmd_dims,
    "fourier": cmd_fourier,
}


# ==========================
# Argument parsing
# ==========================

def _common(suppress):
    """Shared options; subcommand copies must not overwrite top-level values."""
    def dflt(v):
        return argparse.SUPPRESS if suppress else v
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--quadform", default=dflt("x^2+y^2+z^2"), help="quadratic form (polynomial)")
    c.add_argument("--quadform-matrix", default=dflt(None),
                   help="JSON 3x3 symmetric matrix (overrides --quadform)")
    c.add_argument("--seed", type=int, default=dflt(None),
                   help=f"random seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    c.add_argument("--cluster-tol", type=float, default=dflt(conic.CLUSTER_TOL))
    c.add_argument("--div-tol", type=float, default=dflt(poly.DIV_TOL))
    c.add_argument("--rank-tol", type=float, default=dflt(moduli.RANK_TOL))
    c.add_argument("--json", action="store_true", default=dflt(False), help="emit JSON")
    c.add_argument("--show-config", action="store_true", default=dflt(False),
                   help="print the resolved configuration and exit")
    return c


def build_parser():
    common = _common(suppress=True)
    ap = argparse.ArgumentParser(prog="qmultipole", parents=[_common(suppress=False)],
                                 description="Multipole decompositions on quadratic surfaces.")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("decompose", parents=[common])
    p.add_argument("--poly", required=True)
    p.add_argument("--policy", choices=["real", "complex"], default="real")
    p.add_argument("--enumerate", action="store_true",
                   help="list the leading multipoles of every parcelling")
    p.add_argument("--cap", type=int, default=10_000)

    p = sub.add_parser("harmonics", parents=[common])
    p.add_argument("--poly", required=True)

    p = sub.add_parser("dirichlet", parents=[common])
    p.add_argument("--laplacian", "--lap", dest="lap", required=True, help="right-hand side M")
    p.add_argument("--boundary", required=True, help="boundary data N")
    p.add_argument("--order", choices=["top_down", "bottom_up"], default="top_down")

    p = sub.add_parser("maxwell", parents=[common])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--apply", help="JSON list of direction vectors")
    g.add_argument("--represent", help="harmonic polynomial")

    p = sub.add_parser("parcellings", parents=[common])
    p.add_argument("--mults", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--count-only", action="store_true")
    g.add_argument("--enumerate", action="store_true", help="list parcellings (default)")

    for name in ("ramified", "nullity"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--lines", required=True, help="JSON list of linear forms")

    p = sub.add_parser("gamma-fibers", parents=[common])
    p.add_argument("--center", help="JSON 3-vector (default: random, from the seed)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--target", help='JSON list of {"s": [s0, s1], "mult": m}')
    g.add_argument("--random-degree", type=int)

    p = sub.add_parser("dims", parents=[common])
    p.add_argument("--quadform-degree", type=int, default=2)
    p.add_argument("--partition")
    p.add_argument("--degree", type=int)

    p = sub.add_parser("fourier", parents=[common])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--poly")
    g.add_argument("--csv", help="file of theta,phi,value rows")
    p.add_argument("--kmax", type=int)
    p.add_argument("--order", type=int)
    return ap


def resolve_seed(flag, environ=None):
    """Explicit ``--seed`` first, then ``QM_SEED``, then the default."""
    environ = os.environ if environ is None else environ
    if flag is not None:
        return flag
    env = environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = args.command
    try:
        seed = resolve_seed(args.seed)
        qspec = args.quadform
        if args.quadform_matrix is not None:
            rows = [[_parse_number(c) for c in r] for r in json.loads(args.quadform_matrix)]
            qspec = np.array(rows, dtype=np.complex128)
        cfg = RunConfig(command, qspec, seed, args.cluster_tol, args.div_tol,
                        args.rank_tol, "json" if args.json else "human")
        if args.show_config:
            print(dump({"schema": SCHEMA, "config": cfg.to_json()}), file=stdout)
            return 0
        if command is None:
            ap.print_usage(stderr)
            return 2
        rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
        saved, poly.DIV_TOL = poly.DIV_TOL, cfg.div_tol
        try:
            doc, text = COMMANDS[command](args, cfg, rng)
        finally:
            poly.DIV_TOL = saved
    except QMError as exc:
        print(dump({"schema": SCHEMA, "command": command, "error": exc.to_dict()}), file=stdout)
        print(f"error: {exc}", file=stderr)
        return 1
    except (UsageError, ValueError, OSError, json.JSONDecodeError) as exc:
        err = {"code": "usage", "message": str(exc), "witness": None}
        print(dump({"schema": SCHEMA, "command": command, "error": err}), file=stdout)
        print(f"usage error: {exc}", file=stderr)
        return 2
    if args.json:
        print(dump(dict(doc, schema=SCHEMA, command=command, seed=seed)), file=stdout)
    else:
        print("\n".join(text), file=stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
