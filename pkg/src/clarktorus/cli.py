"""Command-line front end: ``clarktorus construct | verify | scan``.

Every command prints a JSON report ``{command, config, checks, artifacts}``
and writes artifacts under the output directory (``--output-dir``, else
``$CLARKTORUS_OUTPUT_DIR``, else ``./clarktorus-out``).

Exit codes: 0 success, 1 construction or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import measures as M
from .clark import (
    construct_clark,
    support_residual,
    verify_disintegration,
    verify_slice_decomposition,
)
from .errors import ClarkError
from .inner_functions import load_map
from .model_space import (
    annihilation_check,
    isometry_gram_residual,
    kernel_gram,
    unitarity_scan_all,
    verify_cauchy_double,
    verify_cauchy_transform,
)

OUTPUT_ENV = "CLARKTORUS_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _power_of_two(text: str) -> int:
    n = int(text)
    if n < 64 or n & (n - 1):
        raise argparse.ArgumentTypeError("nodes must be a power of two, at least 64")
    return n


def _radii(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("radii must be comma-separated numbers") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--phi", required=True, help="catalog name or path to a JSON coefficient file")
    common.add_argument("--alpha", type=float, default=0.0, help="alpha as a fraction of a full turn")
    common.add_argument("--nodes", type=_power_of_two, default=512, help="quadrature nodes per dimension")
    common.add_argument("--radii", type=_radii, default=M.DEFAULT_RADII, help="radial schedule, comma separated")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output-dir", default=None)
    common.add_argument("--seed", type=int, default=0, help="seed for random point panels")

    p = argparse.ArgumentParser(prog="clarktorus", description="Build and check Clark measures of rational maps of the bidisc")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("construct", parents=[common], help="build and certify a Clark measure")
    sub.add_parser("verify", parents=[common], help="run the identity suite")
    s = sub.add_parser("scan", parents=[common], help="unitarity and continuity scans over an alpha grid")
    s.add_argument("--grid", type=int, default=16, help="number of alpha values (at most 256)")
    s.add_argument("--maxdeg", type=int, default=8, help="polynomial degree of the density scan")
    return p


def _config(args) -> dict:
    d = {k: v for k, v in vars(args).items() if k != "output_dir"}
    d["radii"] = list(args.radii)
    return d


def _out_dir(args) -> Path:
    d = Path(args.output_dir or os.environ.get(OUTPUT_ENV) or "clarktorus-out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _check(name, residual, threshold, skipped=False) -> dict:
    c = {"name": name, "residual": None if residual is None else float(residual), "threshold": threshold}
    c["pass"] = True if skipped else bool(residual < threshold)
    if skipped:
        c["skipped"] = True
    return c


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in r])


def _graph_of(mu):
    if isinstance(mu, M.Graph):
        return mu
    if isinstance(mu, M.Sum):
        for _, m in mu.terms:
            if isinstance(m, M.Graph):
                return m
    return None


def _panel(rng, count: int, n: int, radius: float = 0.9) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=(count, n)))
    return r * np.exp(2j * np.pi * rng.uniform(size=(count, n)))


def cmd_construct(args, phi, alpha, spec, out: Path):
    mu, cert = construct_clark(phi, alpha, spec)
    stem = f"construct-{phi.name or 'phi'}"
    artifacts = []
    if args.format == "json":
        path = out / f"{stem}-measure.json"
        path.write_text(_dump({"measure": mu.to_dict(), "certificate": cert.to_dict()}))
    else:
        path = out / f"{stem}-measure.csv"
        g = _graph_of(mu)
        if g is not None:
            path.write_text(M.graph_csv(g))
        else:
            pts, w = mu.rule(min(spec.nodes_per_dim, 256))
            rows = [(float(np.angle(p[0]) % (2 * np.pi)), float(np.angle(p[-1]) % (2 * np.pi)), float(x.real)) for p, x in zip(pts, w)]
            _write_csv(path, ["angle1", "angle2", "weight"], rows)
    artifacts.append(str(path))
    checks = [
        _check("defining-property-poisson-match", cert.poisson_match_residual, 1e-6),
        _check("mass-identity", cert.mass_residual, 1e-8),
    ]
    report = {"command": "construct", "certificate": cert.to_dict(), "checks": checks, "artifacts": artifacts}
    return report, 0 if cert.accepted else 1


def positivity_residual(mu, N: int) -> float:
    """Largest negative weight (or sampled density value); 1 for negative declared weights."""
    if not mu.declared_weights_nonnegative():
        return 1.0
    if isinstance(mu, M.AbsCont):
        x = np.exp(2j * np.pi * np.arange(64) / 64)
        pts = np.stack(np.meshgrid(*([x] * mu.n), indexing="ij"), axis=-1).reshape(-1, mu.n)
        vals = np.asarray(mu.density(pts)).real
    else:
        vals = mu.rule(N)[1].real
    return float(max(-vals.min(initial=0.0), 0.0))


TEST_FUNCTIONS = {
    "1": lambda p: np.ones(p.shape[0]),
    "z1": lambda p: p[:, 0],
    "z1*conj(z2)": lambda p: p[:, 0] * np.conj(p[:, 1]),
    "z1^2*z2": lambda p: p[:, 0] ** 2 * p[:, 1],
}


def cmd_verify(args, phi, alpha, spec, out: Path):
    rng = np.random.default_rng(args.seed)
    mu, cert = construct_clark(phi, alpha, spec)
    inner = phi.is_inner
    checks = [
        _check("defining-property-poisson-match", cert.poisson_match_residual, 1e-6),
        _check("mass-identity", cert.mass_residual, 1e-8),
    ]
    neg = positivity_residual(mu, spec.nodes_per_dim)
    checks.append(_check("positivity", neg, 1e-12))
    ok, bad = M.pluriharmonic_support_check(mu, 8, 1e-6, spec)
    checks.append(_check("pluriharmonic-fourier-support", max([v for _, v in bad], default=0.0), 1e-6))
    if inner:
        checks.append(_check("support-on-level-set", support_residual(phi, alpha, mu, spec), 1e-8))
    else:
        checks.append(_check("support-on-level-set", None, 1e-8, skipped=True))
    if phi.n == 2:
        sd = max(verify_slice_decomposition(phi, alpha, f, spec, measure=mu) for f in TEST_FUNCTIONS.values())
        checks.append(_check("slice-decomposition", sd, 1e-6))
        dspec = M.QuadratureSpec(nodes_per_dim=min(spec.nodes_per_dim, 256), radii=spec.radii)
        dis = float(np.max(verify_disintegration(phi, list(TEST_FUNCTIONS.values()), dspec)))
        checks.append(_check("disintegration-over-alpha", dis, 1e-5))
    zs, ws = _panel(rng, 25, phi.n), _panel(rng, 25, phi.n)
    cd = max(verify_cauchy_double(phi, alpha, z, w, spec, mu) for z, w in zip(zs, ws))
    checks.append(_check("cauchy-kernel-double-integral", cd, 1e-6))
    ct = max(verify_cauchy_transform(phi, alpha, z, spec, mu) for z in zs)
    checks.append(_check("cauchy-transform", ct, 1e-6))
    # at w = 0 the double integral is the Cauchy transform minus a constant
    f0 = complex(phi(np.zeros(phi.n)))
    shift = alpha * np.conj(f0) / (1 - alpha * np.conj(f0))
    cons = max(
        abs(M.integrate(mu, lambda p, z=z: M.cauchy_product(z, p), spec) - shift - (1 - phi(z) * np.conj(f0)) / ((1 - np.conj(alpha) * phi(z)) * (1 - alpha * np.conj(f0))))
        for z in zs[:5]
    )
    checks.append(_check("cauchy-double-vs-transform-consistency", cons, 1e-9))
    if inner:
        pts = _panel(rng, 5, phi.n)
        checks.append(_check("isometry-kernel-gram", isometry_gram_residual(phi, alpha, pts, spec, mu), 1e-6))
        eig = np.linalg.eigvalsh(kernel_gram(phi, alpha, pts, spec, mu))
        checks.append(_check("kernel-gram-positive-semidefinite", max(-eig.min(), 0.0), 1e-10))
        if phi.n == 2:
            w1, w2 = _panel(rng, 2, 2, 0.5)
            ann = max(annihilation_check(phi, k, w1, w2, spec) for k in (-2, -1, 1, 2))
            checks.append(_check("model-space-annihilation", ann, 1e-6))
    else:
        for name in ("isometry-kernel-gram", "kernel-gram-positive-semidefinite", "model-space-annihilation"):
            checks.append(_check(name, None, 1e-6, skipped=True))
    artifacts = []
    stem = f"verify-{phi.name or 'phi'}"
    if args.format == "csv":
        path = out / f"{stem}.csv"
        _write_csv(path, ["name", "residual", "threshold", "pass"], [(c["name"], c["residual"] if c["residual"] is not None else "", c["threshold"], c["pass"]) for c in checks])
        artifacts.append(str(path))
    failing = [c["name"] for c in checks if not c["pass"]]
    report = {"command": "verify", "certificate": cert.to_dict(), "checks": checks, "artifacts": artifacts, "failing": failing}
    return report, 0 if not failing else 1


def cmd_scan(args, phi, alpha, spec, out: Path):
    if not 1 <= args.grid <= 256:
        raise UsageError("--grid must be between 1 and 256")
    if not 0 <= args.maxdeg <= 16:
        raise UsageError("--maxdeg must be between 0 and 16")
    if phi.n != 2:
        raise UsageError("scan needs a bivariate map")
    rows, failed = [], 0
    f = lambda p: p[:, 0] * p[:, 1]
    alphas = np.exp(2j * np.pi * np.arange(args.grid) / args.grid)
    vals = []
    for k, a in enumerate(alphas):
        mu, cert = construct_clark(phi, a, spec)
        failed += not cert.accepted
        scans = unitarity_scan_all(phi, a, args.maxdeg, spec, mu) if phi.is_inner else {}
        rho = max((s.residuals[-1] for s in scans.values()), default=float("nan"))
        vals.append(M.integrate(mu, f, spec))
        rows.append([k / args.grid, rho, cert.poisson_match_residual])
    vals = np.array(vals)
    inc = np.abs(np.roll(vals, -1) - vals)
    for r, d in zip(rows, inc):
        r.append(float(d))
    header = ["alpha_turns", "rho_maxdeg", "poisson_match_residual", "continuity_increment"]
    stem = f"scan-{phi.name or 'phi'}"
    if args.format == "csv":
        path = out / f"{stem}.csv"
        _write_csv(path, header, rows)
    else:
        path = out / f"{stem}.json"
        path.write_text(_dump({"columns": header, "rows": rows}))
    checks = [_check("constructions-accepted", float(failed), 0.5)]
    report = {"command": "scan", "checks": checks, "artifacts": [str(path)], "table": {"columns": header, "rows": rows}}
    return report, 0 if failed == 0 else 1


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "scan": cmd_scan}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    try:
        phi = load_map(args.phi)
        spec = M.QuadratureSpec(nodes_per_dim=args.nodes, radii=args.radii)
        alpha = complex(np.exp(2j * np.pi * args.alpha))
        out = _out_dir(args)
        report, code = COMMANDS[args.command](args, phi, alpha, spec, out)
    except (UsageError, KeyError, ValueError, OSError) as exc:
        if isinstance(exc, ClarkError) and not isinstance(exc, (KeyError, ValueError)):
            raise
        print(f"clarktorus: error: {exc}", file=sys.stderr)
        return 2
    except ClarkError as exc:
        print(f"clarktorus: failure: {exc}", file=sys.stderr)
        return 1
    report["config"] = _config(args)
    print(_dump(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
