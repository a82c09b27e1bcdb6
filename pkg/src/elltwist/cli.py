"""Command-line entry point: ``elltwist <command> [options]``.

Commands
  special-fns      sigma, zeta, wp, wp' at a point, plus eta1, eta2 and the Legendre residual
  intersection     the exact 5x5 intersection matrix and its (2,2) cofactor
  connection       connection matrix of a path label or a composite word
  verify-numeric   numeric cross-checks, one JSON record per check

Complex literals: ``a``, ``bi``, ``a+bi`` or ``a-bi`` with optional
exponents (``1e-3-2.5e1i``); ``j`` may replace ``i``.

Exit codes: 0 success, 1 usage or configuration error, 2 domain error
(pole, degenerate lattice), 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import chains
from .errors import (
    DomainError,
    EllTwistError,
    InvalidAlpha,
    UnknownIndex,
    UnknownLabel,
)
from .kernel import make_lattice, sigma, wp, wp_prime, zeta
from .local_system import AlphaParam
from .ratfunc import identity, inverse, mat_eval, matmul, rank

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3

_NUM = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class UsageError(Exception):
    pass


def _real(text: str, whole: str) -> float:
    if not _NUM.fullmatch(text):
        raise UsageError(f"malformed complex literal {whole!r}")
    return float(text)


def parse_complex(text: str) -> complex:
    s = str(text).strip()
    if not s:
        raise UsageError("empty complex literal")
    if s[-1] not in "ij":
        return complex(_real(s, text), 0.0)
    body = s[:-1]
    # split at the last sign that is neither leading nor part of an exponent
    k = max((n for n, ch in enumerate(body) if ch in "+-" and n > 0 and body[n - 1] not in "eE"),
            default=0)
    re_text, im_text = (body[:k], body[k:]) if k else ("", body)
    re_part = _real(re_text, text) if re_text else 0.0
    if im_text in ("", "+"):
        im = 1.0
    elif im_text == "-":
        im = -1.0
    else:
        im = _real(im_text, text)
    return complex(re_part, im)


@dataclass
class RunConfig:
    omega1: complex = 1.0
    omega2: complex = 1j
    alpha: complex = 0.3
    epsilon: float = 0.02
    tolerances: dict = field(default_factory=dict)
    output_path: str | None = None


def _parse_tol(item: str) -> tuple[str, float]:
    if "=" not in item:
        raise UsageError(f"--tol expects name=value, got {item!r}")
    name, val = item.split("=", 1)
    try:
        return name.strip(), float(val)
    except ValueError:
        raise UsageError(f"bad tolerance value in {item!r}") from None


def read_config_file(path: str) -> dict:
    out: dict = {"tol": {}}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "tol":
            k, v = _parse_tol(val)
            out["tol"][k] = v
        elif key.startswith("tol."):
            out["tol"][key[4:]] = _parse_tol(f"{key[4:]}={val}")[1]
        elif key in ("omega1", "omega2", "alpha", "epsilon", "out"):
            out[key] = val
        else:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
    return out


def build_config(args) -> RunConfig:
    file_vals = read_config_file(args.config) if args.config else {"tol": {}}

    def pick(name):
        v = getattr(args, name, None)
        return v if v is not None else file_vals.get(name)

    cfg = RunConfig()
    for name in ("omega1", "omega2", "alpha"):
        v = pick(name)
        if v is not None:
            setattr(cfg, name, parse_complex(v))
    eps = pick("epsilon")
    if eps is not None:
        try:
            cfg.epsilon = float(eps)
        except ValueError:
            raise UsageError(f"bad epsilon {eps!r}") from None
        if cfg.epsilon <= 0:
            raise UsageError("epsilon must be positive")
    cfg.tolerances = dict(file_vals["tol"])
    for item in args.tol or []:
        k, v = _parse_tol(item)
        cfg.tolerances[k] = v
    cfg.output_path = pick("out")
    return cfg


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _alpha(cfg: RunConfig) -> AlphaParam:
    try:
        return AlphaParam(cfg.alpha)
    except InvalidAlpha as exc:
        raise UsageError(str(exc)) from None


def cmd_special_fns(cfg: RunConfig, z: complex) -> tuple[list[dict], int]:
    L = make_lattice(cfg.omega1, cfg.omega2)
    rec = {
        "z": _cx(z),
        "sigma": _cx(sigma(z, L)),
        "zeta": _cx(zeta(z, L)),
        "wp": _cx(wp(z, L)),
        "wp_prime": _cx(wp_prime(z, L)),
        "eta1": _cx(L.eta1),
        "eta2": _cx(L.eta2),
        "g2": _cx(L.g2),
        "g3": _cx(L.g3),
        "legendre_residual": L.legendre_residual(),
    }
    return [rec], EXIT_OK


def cmd_intersection(cfg: RunConfig, at_c: bool) -> tuple[list[dict], int]:
    M = chains.intersection_matrix()
    rec = {
        "index_order": list(chains.J),
        "matrix": chains.render_matrix(M),
        "cofactor_22": str(chains.cofactor(M, 2, 2)),
        "rank": rank(M),
    }
    if at_c:
        a = _alpha(cfg)
        Mc = np.array(mat_eval(M, a.c), dtype=complex)
        Mi = np.array(mat_eval(M, 1 / a.c), dtype=complex)
        rec["alpha"] = _cx(a.alpha)
        rec["c"] = _cx(a.c)
        rec["matrix_at_c"] = [[_cx(x) for x in row] for row in Mc]
        rec["antisymmetry_residual"] = float(np.max(np.abs(Mi.T + Mc)))
    return [rec], EXIT_OK


def cmd_connection(cfg: RunConfig, word: str, verify: bool) -> tuple[list[dict], int]:
    from . import picard_lefschetz as pl

    labels = pl.parse_word(word)
    cm = pl.compose(labels)
    rec = {
        "word": [str(x) for x in labels],
        "index_order": list(chains.J_PRIME),
        "source": cm.source,
        "target": cm.target,
        "matrix": cm.render(),
        "det": str(cm.det()),
    }
    code = EXIT_OK
    if verify:
        expanded = []
        for lab in labels:
            expanded.extend(pl.composite_word(lab))
        ref = identity(4)
        for lab in expanded:
            g = pl.golden_matrix(pl.PathLabel(*lab.key))
            f = g if lab.power > 0 else inverse(g)
            for _ in range(abs(lab.power)):
                ref = matmul(ref, f)
        ok = cm == ref
        rec["verify"] = "PASS" if ok else "FAIL"
        if not ok:
            code = EXIT_VERIFY
    return [rec], code


def cmd_verify_numeric(cfg: RunConfig) -> tuple[list[dict], int]:
    from . import picard_lefschetz as pl
    from . import quadrature as qd

    a = _alpha(cfg)
    L = make_lattice(cfg.omega1, cfg.omega2)
    q = pl.special_configuration("012", L)
    known = set(qd.DEFAULT_THRESHOLDS)
    unknown = set(cfg.tolerances) - known
    if unknown:
        raise UsageError(f"unknown tolerance name(s) {sorted(unknown)}; known: {sorted(known)}")
    th = dict(qd.DEFAULT_THRESHOLDS)
    th.update(cfg.tolerances)
    eps = cfg.epsilon
    recs = qd.numeric_report(q, a, epsilons=(eps, 1.5 * eps, 2.5 * eps), thresholds=th)
    s_grid = (0.30, 0.40, 0.45, 0.48)
    for label in ("01:0,1", "02:1,0"):
        mags = qd.vanishing_limit(label, a, s_grid, L)
        worst_step = max(b / a_ for a_, b in zip(mags[:-1], mags[1:]))
        recs.append({"check": f"vanishing_{label}_monotone", "value": worst_step,
                     "threshold": 1.0, "pass": bool(worst_step < 1.0)})
        ratio = mags[-1] / mags[0]
        recs.append({"check": f"vanishing_{label}_ratio", "value": ratio,
                     "threshold": th["vanishing_ratio"], "pass": bool(ratio < th["vanishing_ratio"])})
    code = EXIT_OK if all(r["pass"] for r in recs) else EXIT_VERIFY
    return recs, code


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--omega1", help="first period (complex literal), default 1")
    p.add_argument("--omega2", help="second period (complex literal), default i")
    p.add_argument("--alpha", help="exponent alpha (complex literal), default 0.3")
    p.add_argument("--epsilon", help="circle radius as a fraction of |omega1|, default 0.02")
    p.add_argument("--tol", action="append", metavar="NAME=VAL", help="override a check threshold")
    p.add_argument("--out", help="also write the NDJSON records to this path")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="elltwist", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("special-fns", help="Weierstrass functions at a point")
    _common(p)
    p.add_argument("--z", required=True, help="evaluation point (complex literal)")
    p = sub.add_parser("intersection", help="exact intersection matrix")
    _common(p)
    p.add_argument("--at-c", action="store_true", help="also evaluate at c = exp(2 pi i alpha)")
    p = sub.add_parser("connection", help="connection matrix of a path or word")
    _common(p)
    p.add_argument("word", help="label such as '01:0,1' or a word '01:0,1^-1 * 02:1,0 * ...'")
    p.add_argument("--verify", action="store_true", help="compare against the reference matrices")
    p = sub.add_parser("verify-numeric", help="numeric cross-checks")
    _common(p)
    return parser


def _emit(records: list[dict], out: str | None):
    text = "".join(json.dumps(r, sort_keys=False) + "\n" for r in records)
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        cfg = build_config(args)
        if args.command == "special-fns":
            recs, code = cmd_special_fns(cfg, parse_complex(args.z))
        elif args.command == "intersection":
            recs, code = cmd_intersection(cfg, args.at_c)
        elif args.command == "connection":
            recs, code = cmd_connection(cfg, args.word, args.verify)
        else:
            recs, code = cmd_verify_numeric(cfg)
        _emit(recs, cfg.output_path)
        return code
    except (UsageError, UnknownLabel, UnknownIndex) as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except EllTwistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
