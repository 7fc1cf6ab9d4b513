"""Command-line front end.

Exit codes: 0 when every verification passed, 1 when a mathematical check
failed (residuals are reported), 2 for usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .bounds import emit_table, q_bounds, witness_map
from .harmonics import fourier_degree
from .hodge import (
    HodgeContext,
    extract_fiber_map,
    intertwiner_p,
    verify_p_equivariance,
)
from .hopf import (
    CHAINS,
    CliffordSystem,
    NormedBilinear,
    chain_witness,
    clifford_hopf_map,
    clifford_system,
    normed_bilinear_from_clifford,
    odd_sphere_fibration,
    radon_hurwitz,
    verify_normed,
)
from .linalg import adjoint, is_identity, matmul
from .poly_core import MultiPoly, rational_sphere_points
from .sphere_maps import (
    MatrixPolyMap,
    ProjectorMap,
    SphereMap,
    is_constant,
    maps_equal,
    verify_matrix_map,
    verify_projector_map,
    verify_sphere_map,
)
from .wilson import (
    FlatBundle,
    SchottkyGroup,
    check_simple_length_spectrum,
    evaluate_classes,
    trivial_bundle,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

# The Hopf fibration S^3 -> S^2 as displayed for the dim-4 intertwiner.
HOPF_S3_EXPECTED = (
    {(2, 0, 0, 0): 1, (0, 2, 0, 0): 1, (0, 0, 2, 0): -1, (0, 0, 0, 2): -1},
    {(0, 1, 1, 0): 2, (1, 0, 0, 1): -2},
    {(1, 0, 1, 0): 2, (0, 1, 0, 1): 2},
)


class InputError(Exception):
    """Malformed input; maps to exit code 2."""


def thread_cap() -> int:
    """Worker cap from SPHEREMAP_THREADS (default 1: run in-process)."""
    raw = os.environ.get("SPHEREMAP_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"SPHEREMAP_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise InputError("SPHEREMAP_THREADS must be positive")
    return n


def parallel_map(fn, items: list) -> list:
    """Order-preserving map, over worker processes when the cap allows."""
    workers = min(thread_cap(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# I/O


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_map(obj):
    """SphereMap, MatrixPolyMap or ProjectorMap from its JSON form."""
    try:
        if "coords" in obj:
            return SphereMap.from_json(obj)
        if "group" in obj:
            return MatrixPolyMap.from_json(obj)
        if "ambient" in obj:
            return ProjectorMap.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed map: {exc}") from exc
    raise InputError("unrecognised map JSON (need 'coords', 'group' or 'ambient')")


# Certificates


def object_hash(obj_json) -> str:
    canon = json.dumps(obj_json, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def certificate(obj, *, provenance=(), seeds=None, rerun=None) -> dict:
    """Verification certificate for a map, matrix map, projector or Clifford system."""
    if isinstance(obj, SphereMap):
        report = verify_sphere_map(obj)
        invariants = {
            "sphere_identity": report.passed,
            "is_constant": is_constant(obj),
            "degree_repr": obj.degree_repr,
            "source_dim": obj.source_dim,
            "target_dim": obj.target_dim,
        }
        kind, passed = "sphere_map", report.passed
        detail = report.to_json()
    elif isinstance(obj, MatrixPolyMap):
        report = verify_matrix_map(obj)
        invariants = {
            "group_identity": report.passed,
            "is_constant": is_constant(obj),
            "degree_repr": obj.degree_repr,
            "group": obj.group,
            "size": obj.size,
        }
        kind, passed = "matrix_map", report.passed
        detail = report.to_json()
    elif isinstance(obj, ProjectorMap):
        report = verify_projector_map(obj)
        invariants = {"projector_identities": report.passed, "is_constant": is_constant(obj), "rank": obj.rank}
        kind, passed = "projector_map", report.passed
        detail = report.to_json()
    elif isinstance(obj, CliffordSystem):
        problems = obj.check()
        normed = verify_normed(normed_bilinear_from_clifford(obj)) if not problems else False
        invariants = {
            "dim": obj.dim,
            "structure_count": len(obj.structures),
            "expected_count": radon_hurwitz(obj.dim) - 1,
            "clifford_identities": not problems,
            "normed_identity": normed,
        }
        kind = "clifford_system"
        passed = not problems and normed and len(obj.structures) == radon_hurwitz(obj.dim) - 1
        detail = {"problems": problems}
    elif isinstance(obj, NormedBilinear):
        ok = verify_normed(obj)
        invariants = {"normed_identity": ok, "shape": [obj.r, obj.s, obj.t]}
        kind, passed, detail = "normed_bilinear", ok, {}
    else:
        raise TypeError(f"no certificate for {type(obj).__name__}")
    body = obj.to_json()
    return {
        "kind": kind,
        "object_sha256": object_hash(body),
        "passed": passed,
        "invariants": invariants,
        "report": detail,
        "provenance": list(provenance),
        "seeds": dict(seeds or {}),
        "rerun": rerun,
        "tool_version": __version__,
        "object": body,
    }


def emit_certificate(obj, path: str, **kw) -> dict:
    cert = certificate(obj, **kw)
    write_atomic(path, _dump(cert))
    return cert


# Verbs


def _witness_ok(wid: str) -> bool:
    try:
        witness_map(wid)
        return True
    except RuntimeError:
        return False


def cmd_qtable(args) -> int:
    if args.max_n < 2:
        raise InputError("--max-n must be at least 2")
    status = EXIT_OK
    if args.verify:
        wids = sorted({q_bounds(n).witness for n in range(2, args.max_n + 1)})
        results = parallel_map(_witness_ok, wids)
        failed = [w for w, ok in zip(wids, results) if not ok]
        if failed:
            sys.stderr.write(f"witness verification failed: {', '.join(failed)}\n")
            status = EXIT_FAIL
    _emit(emit_table(args.max_n, args.format), args.out)
    return status


def cmd_verify_map(args) -> int:
    F = load_map(_load_json(args.map))
    cert = certificate(F, seeds={"seed": args.seed}, rerun=f"verify-map {args.map}")
    if args.certificate:
        write_atomic(args.certificate, _dump(cert))
    summary = {
        "passed": cert["passed"],
        "invariants": cert["invariants"],
        "residuals": cert["report"].get("residuals", {}),
    }
    _emit(_dump(summary), args.out)
    return EXIT_OK if cert["passed"] else EXIT_FAIL


def cmd_hopf(args) -> int:
    chosen = [x is not None for x in (args.m, args.chain, args.odd)]
    if sum(chosen) != 1:
        raise InputError("give exactly one of --m, --chain, --odd")
    if args.m is not None:
        if args.m < 1:
            raise InputError("--m must be positive")
        F, name = clifford_hopf_map(args.m), f"clifford_hopf(m={args.m})"
    elif args.chain is not None:
        if args.chain not in CHAINS:
            raise InputError(f"--chain must be one of {', '.join(CHAINS)}")
        F, name = chain_witness(args.chain), f"chain({args.chain})"
    else:
        if args.odd < 1:
            raise InputError("--odd must be positive")
        F, name = odd_sphere_fibration(args.odd), f"odd_sphere_fibration(k={args.odd})"
    cert = certificate(F, provenance=[name], seeds={"seed": args.seed})
    if args.certificate:
        write_atomic(args.certificate, _dump(cert))
    _emit(_dump(F.to_json()), args.out)
    return EXIT_OK if cert["passed"] and not cert["invariants"]["is_constant"] else EXIT_FAIL


def cmd_clifford(args) -> int:
    if args.m < 1:
        raise InputError("--m must be positive")
    cs = clifford_system(args.m)
    cert = certificate(cs, provenance=["clifford_construction"], seeds={"seed": args.seed})
    if args.certificate:
        write_atomic(args.certificate, _dump(cert))
    _emit(_dump(cs.to_json()), args.out)
    return EXIT_OK if cert["passed"] else EXIT_FAIL


def hodge_check(dim: int, trials: int, seed: int) -> dict:
    if dim < 4 or dim % 2:
        raise InputError("--dim must be an even number >= 4")
    if trials < 1:
        raise InputError("--trials must be positive")
    ctx = HodgeContext(dim)
    iso_fail = 0
    for v in rational_sphere_points(dim - 1, trials, seed):
        M = intertwiner_p(ctx, v)
        if not is_identity(matmul(adjoint(M), M)):
            iso_fail += 1
    eq = verify_p_equivariance(ctx, trials, seed)
    fiber = None
    if dim == 4:
        expected = SphereMap(3, 2, tuple(MultiPoly(4, t) for t in HOPF_S3_EXPECTED))
        fiber = maps_equal(extract_fiber_map(ctx), expected)
    return {
        "dim": dim,
        "seed": seed,
        "isometry": iso_fail == 0 and eq.isometry_failures == 0,
        "isometry_failures": iso_fail,
        "equivariance": {"trials": eq.trials, "failures": eq.failures},
        "star_commutation_failures": eq.star_commutation_failures,
        "fiber_map_matches_hopf": fiber,
    }


def cmd_hodge_check(args) -> int:
    rep = hodge_check(args.dim, args.trials, args.seed)
    _emit(_dump(rep), args.out)
    ok = rep["isometry"] and not rep["equivariance"]["failures"] and not rep["star_commutation_failures"]
    return EXIT_OK if ok and rep["fiber_map_matches_hopf"] is not False else EXIT_FAIL


def cmd_harmonic_degree(args) -> int:
    F = load_map(_load_json(args.map))
    ctx = F.ctx
    if isinstance(F, SphereMap):
        degrees = [fourier_degree(c, ctx) for c in F.coords]
    else:
        degrees = [[fourier_degree(e, ctx) for e in row] for row in F.entries]
    flat = degrees if isinstance(F, SphereMap) else [d for row in degrees for d in row]
    rep = {"degrees": degrees, "max": max(flat, default=0)}
    if args.format == "text":
        _emit(" ".join(map(str, flat)) + f"\nmax {rep['max']}\n", args.out)
    else:
        _emit(_dump(rep), args.out)
    return EXIT_OK


def cmd_wilson(args) -> int:
    if args.max_word_len < 1:
        raise InputError("--max-word-len must be positive")
    if args.tol <= 0:
        raise InputError("--tol must be positive")
    try:
        G = SchottkyGroup.from_json(_load_json(args.group))
        B = FlatBundle.from_json(_load_json(args.bundle)) if args.bundle else trivial_bundle(G.rank)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed group or bundle: {exc}") from exc
    if len(B.images) != G.rank:
        raise InputError(f"bundle has {len(B.images)} images for {G.rank} generators")
    entries = evaluate_classes(G, args.max_word_len, B)
    bound_ok = all(_abs2(e.wilson) <= B.rank**2 for e in entries)
    spectrum = check_simple_length_spectrum(entries, args.tol)
    if args.spectrum_report:
        write_atomic(args.spectrum_report, _dump(spectrum.to_json()))
    _emit(_dump([e.to_json() for e in entries]), args.out)
    sys.stderr.write(
        f"{len(entries)} classes; {len(spectrum.collisions)} unforced length collisions at tol {args.tol}\n"
    )
    return EXIT_OK if bound_ok else EXIT_FAIL


def _abs2(w):
    return w.norm() if hasattr(w, "norm") else w * w


# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random draw (default 0)")
    common.add_argument("--out", help="write the main output here instead of stdout")

    p = argparse.ArgumentParser(prog="spheremaps", description="Certified polynomial sphere maps and related invariants.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    s = sub.add_parser("qtable", parents=[common], help="bounds table for q(n), q_G(n), m_F(n)")
    s.add_argument("--max-n", type=int, required=True)
    s.add_argument("--format", choices=("text", "json", "csv"), default="text")
    s.add_argument("--verify", action="store_true", help="build and verify every witness map")
    s.set_defaults(func=cmd_qtable)

    s = sub.add_parser("verify-map", parents=[common], help="verify a map JSON file")
    s.add_argument("map")
    s.add_argument("--certificate", help="also write a certificate JSON here")
    s.set_defaults(func=cmd_verify_map)

    s = sub.add_parser("hopf", parents=[common], help="emit a Hopf-construction map")
    s.add_argument("--m", type=int, help="Clifford Hopf map S^{m+rho(m)-1} -> S^m")
    s.add_argument("--chain", help=f"composite witness, one of {', '.join(CHAINS)}")
    s.add_argument("--odd", type=int, help="quadratic S^{2k+1} -> S^{2k}")
    s.add_argument("--certificate")
    s.set_defaults(func=cmd_hopf)

    s = sub.add_parser("clifford", parents=[common], help="emit a Clifford system on R^m")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--certificate")
    s.set_defaults(func=cmd_clifford)

    s = sub.add_parser("hodge-check", parents=[common], help="exact isometry/equivariance checks of p")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--trials", type=int, default=10)
    s.set_defaults(func=cmd_hodge_check)

    s = sub.add_parser("harmonic-degree", parents=[common], help="Fourier degree of each coordinate")
    s.add_argument("map")
    s.add_argument("--format", choices=("text", "json"), default="json")
    s.set_defaults(func=cmd_harmonic_degree)

    s = sub.add_parser("wilson", parents=[common], help="Wilson vector and trace-formula data")
    s.add_argument("--group", required=True)
    s.add_argument("--bundle")
    s.add_argument("--max-word-len", type=int, default=6)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--spectrum-report")
    s.set_defaults(func=cmd_wilson)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        thread_cap()
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
