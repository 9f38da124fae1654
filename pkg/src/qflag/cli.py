"""Command-line entry point.

Every command prints ``key=value`` records, one per line.  Exit status:
0 all verdicts pass, 1 some verdict fails, 2 indeterminate (a size cap was hit),
3 configuration error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import classify as cl
from . import coeffalg as ca
from . import flagalg as fa
from . import fockrep as fr
from . import uqmod as um
from . import weyl as wy
from .rootdata import build_root_system

EXIT_PASS, EXIT_FAIL, EXIT_INDETERMINATE, EXIT_CONFIG = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    type_letter: str = "A"
    rank: int = 1
    S: tuple = ()
    q: Fraction = Fraction(1, 2)
    backend: str = "float"
    N: int = fr.DEFAULT_N
    tol: float | None = None
    sigma: tuple | None = None
    sigma2: tuple | None = None
    lam: tuple | None = None
    lam2: tuple | None = None
    output: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def rs(self):
        return build_root_system(self.type_letter, self.rank)

    @property
    def backend_obj(self) -> um.Backend:
        return um.Backend(self.backend, self.q)


def _int_list(text: str | None) -> tuple | None:
    if text is None:
        return None
    text = text.strip()
    if text in ("", "e"):
        return ()
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer list {text!r}") from exc


def make_config(ns: argparse.Namespace) -> RunConfig:
    try:
        cfg = RunConfig(
            type_letter=ns.type.upper(), rank=ns.rank, S=_int_list(ns.S) or (),
            q=Fraction(ns.q), backend=ns.backend, N=ns.N, tol=ns.tol,
            sigma=_int_list(ns.sigma), sigma2=_int_list(getattr(ns, "sigma2", None)),
            lam=_int_list(ns.lam), lam2=_int_list(getattr(ns, "lambda2", None)), output=ns.output,
        )
        rs = cfg.rs
        cfg.backend_obj
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.N < 1:
        raise ConfigError("N must be positive")
    for s in cfg.S:
        if not 1 <= s <= rs.rank:
            raise ConfigError(f"node {s} out of range")
    for name in ("lam", "lam2"):
        lam = getattr(cfg, name)
        if lam is not None:
            if len(lam) != rs.rank or min(lam, default=0) < 0:
                raise ConfigError(f"weight {lam} is not dominant of rank {rs.rank}")
    for name in ("sigma", "sigma2"):
        word = getattr(cfg, name)
        if word is not None:
            if any(not 1 <= i <= rs.rank for i in word):
                raise ConfigError(f"letter out of range in {word}")
            try:
                wy.WeylWord.of(rs, word)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
    return cfg


def _need(cfg: RunConfig, *names):
    for n in names:
        if getattr(cfg, n) is None:
            raise ConfigError(f"--{ {'lam': 'lambda', 'lam2': 'lambda2'}.get(n, n)} is required")


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    if isinstance(x, (list, tuple)):
        return "(" + ",".join(_fmt(y) for y in x) + ")"
    return str(x).replace(" ", "")


def record(**kv) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in kv.items())


class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.status = EXIT_PASS

    def add(self, line: str):
        self.lines.append(line)

    def verdict(self, v: cl.Verdict):
        self.add(v.record())
        if not v.passed:
            self.status = max(self.status, EXIT_FAIL)

    def flag(self, ok: bool):
        if not ok:
            self.status = max(self.status, EXIT_FAIL)


# -- commands --------------------------------------------------------------------

def cmd_roots(cfg, rep):
    rs = cfg.rs
    rep.add(record(type=rs.name, rank=rs.rank, d=rs.d,
                   cartan=[tuple(int(x) for x in row) for row in rs.cartan]))
    for rc in rs.positive_roots_rc:
        rep.add(record(root=rc, height=sum(rc)))


def cmd_weyl(cfg, rep):
    rs = cfg.rs
    par = wy.minimal_coset_reps(rs, cfg.S, allow_full=True)
    rep.add(record(type=rs.name, S=cfg.S, W_order=len(wy.elements(rs)), W_S_order=par.W_S_order,
                   W_S_min_reps=len(par.minimal_reps)))
    for w in par.minimal_reps:
        rep.add(record(word=repr(w), length=w.length, gamma=wy.gamma_sequence(w)))


def cmd_module(cfg, rep):
    _need(cfg, "lam")
    V = um.build_irreducible(cfg.rs, cfg.lam, cfg.backend_obj)
    rep.add(record(type=cfg.rs.name, highest_weight=V.highest_weight, dim=V.dim,
                   weyl_dim=cfg.rs.weyl_dimension(cfg.rs.weight(cfg.lam))))
    for mu, m in sorted(V.weight_multiplicities().items(), reverse=True):
        rep.add(record(weight=mu, multiplicity=m))


def cmd_tensor(cfg, rep):
    _need(cfg, "lam", "lam2")
    rs, b = cfg.rs, cfg.backend_obj
    T = um.tensor(um.build_irreducible(rs, cfg.lam, b), um.build_irreducible(rs, cfg.lam2, b))
    rep.add(record(type=rs.name, left=cfg.lam, right=cfg.lam2, dim=T.dim))
    for mu, m in sorted(um.decompose_highest_weights(T).items(), reverse=True):
        rep.add(record(component=mu, multiplicity=m))


def cmd_verify_commutation(cfg, rep):
    _need(cfg, "lam", "lam2")
    rs, b = cfg.rs, cfg.backend_obj
    V, W = um.build_irreducible(rs, cfg.lam, b), um.build_irreducible(rs, cfg.lam2, b)
    tol = cfg.tol or 1e-9
    for variant in ("N", "N_rev", "O"):
        for v in range(V.dim):
            for w in range(W.dim):
                r = ca.commutation_defect(V, W, v, w, variant)
                ok = r.in_span and r.residual < tol
                rep.flag(ok)
                rep.add(record(claim="commutation", variant=variant, v=V.weights[v], w=W.weights[w],
                               verdict="pass" if ok else "fail", residual=r.residual,
                               span=r.span_size))


def cmd_verify_unitarity(cfg, rep):
    _need(cfg, "lam")
    V = um.build_irreducible(cfg.rs, cfg.lam, cfg.backend_obj)
    for i in range(V.dim):
        for j in range(V.dim):
            ok = ca.unitarity_check(V, i, j)
            rep.flag(ok)
            rep.add(record(claim="unitarity", i=i, j=j, verdict="pass" if ok else "fail"))


def cmd_spectrum(cfg, rep):
    _need(cfg, "sigma", "lam")
    w = wy.WeylWord.of(cfg.rs, cfg.sigma)
    L = fr.L_operator(w, cfg.lam, N=cfg.N, backend=cfg.backend_obj)
    ev = np.sort(L.diagonal().real)[::-1] if L.is_diagonal(1e-12) else fr.spectrum(L)[::-1]
    rep.add(record(type=cfg.rs.name, sigma=repr(w), lam=cfg.lam, N=cfg.N, diagonal=L.is_diagonal(1e-12)))
    values = sorted(set(round(float(x), 12) for x in ev), reverse=True)
    rep.add(record(eigenvalues=values))


def _sigmas(cfg):
    if cfg.sigma is not None:
        return [wy.WeylWord.of(cfg.rs, cfg.sigma)]
    return list(wy.elements(cfg.rs))


def _lams(cfg):
    if cfg.lam is not None:
        return [cfg.lam]
    return [tuple(int(i == j) for j in range(cfg.rs.rank)) for i in range(cfg.rs.rank)]


def cmd_verify_part1(cfg, rep):
    for w in _sigmas(cfg):
        for lam in _lams(cfg):
            rep.verdict(cl.check_vanishing(cfg.rs, w, lam, cfg.N, cfg.tol or 1e-10))


def _ctx(cfg):
    try:
        return fa.FlagContext(cfg.rs, cfg.S, cfg.backend_obj)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_verify_h1(cfg, rep):
    ctx = _ctx(cfg)
    sigmas = _sigmas(cfg) if cfg.sigma is not None else ctx.parabolic.minimal_reps
    lams = [cfg.lam] if cfg.lam is not None else ctx.regular_weights()
    for w in sigmas:
        for lam in lams:
            try:
                rep.verdict(cl.check_h1(ctx, w, lam, cfg.N))
            except cl.PreconditionError as exc:
                raise ConfigError(str(exc)) from exc


def cmd_verify_inequivalence(cfg, rep):
    ctx = _ctx(cfg)
    if cfg.sigma is not None and cfg.sigma2 is not None:
        pairs = [(cfg.sigma, cfg.sigma2)]
    else:
        pairs = cl.unordered_pairs(ctx)
    for a, b in pairs:
        try:
            rep.verdict(cl.check_inequivalence(ctx, a, b, cfg.N))
        except cl.PreconditionError as exc:
            raise ConfigError(str(exc)) from exc


def cmd_verify_restriction(cfg, rep):
    ctx = _ctx(cfg)
    gens = fa.a_s_generators(ctx)
    for w in _sigmas(cfg):
        for t in fr.roots_of_unity_points(cfg.rs.rank, 3):
            rep.verdict(cl.check_restriction_factorization(ctx, w, t, cfg.N, generators=gens))


def cmd_gelfand(cfg, rep):
    cases = fa.gelfand_nodes(cfg.type_letter, cfg.rank)
    rep.add(record(type=cfg.rs.name, count=len(cases), nodes=[c.node for c in cases]))
    for c in cases:
        rep.add(record(node=c.node, family=c.family))


def cmd_prv(cfg, rep):
    ctx = _ctx(cfg)
    targets = [cfg.lam] if cfg.lam is not None else fa.spherical_weights(ctx)
    for t in targets:
        w, mult = fa.prv_multiplicity_check(ctx, t)
        ok = w is not None and mult >= 1
        rep.flag(ok)
        rep.add(record(claim="prv", target=t, witness=repr(w) if w else "none", multiplicity=mult,
                       verdict="pass" if ok else "fail"))


def cmd_factorize(cfg, rep):
    ctx = _ctx(cfg)
    r = fa.factorization_evidence(ctx)
    rep.flag(r.passed)
    rep.add(record(claim="factorize", context=r.context, node=r.node, spherical=r.spherical,
                   multiplicity_free=r.multiplicity_free, exhaustive=r.exhaustive,
                   verdict="pass" if r.passed else "fail"))
    for n, lam, m, ok in r.degree_checks:
        rep.add(record(degree=n, weight=lam, multiplicity=m, verdict="pass" if ok else "fail"))


def _suite_matrix():
    """Declared contexts; every anchor is exercised at least once."""
    return [
        ("verify-unitarity", dict(type_letter="A", rank=1, lam=(1,))),
        ("verify-unitarity", dict(type_letter="A", rank=2, lam=(1, 0))),
        ("verify-commutation", dict(type_letter="A", rank=2, lam=(1, 0), lam2=(0, 1))),
        ("verify-part1", dict(type_letter="A", rank=2)),
        ("verify-h1", dict(type_letter="A", rank=2, S=(1,))),
        ("verify-h1", dict(type_letter="B", rank=2, S=(2,))),
        ("verify-inequivalence", dict(type_letter="A", rank=2, S=(2,))),
        ("verify-restriction", dict(type_letter="A", rank=2, S=(1,))),
        ("prv", dict(type_letter="C", rank=2, S=(2,))),
        ("factorize", dict(type_letter="A", rank=2, S=(2,))),
        ("facto", dict(type_letter="B", rank=2, sigma=(2, 1), lam=(1, 1))),
        ("gns", dict(type_letter="A", rank=2, S=(2,), lam=(1, 0))),
        ("reduced-word", dict(type_letter="A", rank=2)),
    ]


def _suite_extra(name, cfg, rep):
    rs = cfg.rs
    if name == "facto":
        rep.verdict(cl.check_facto(rs, cfg.sigma, cfg.lam, cfg.N))
    elif name == "gns":
        ctx = _ctx(cfg)
        for w in ctx.parabolic.minimal_reps:
            rep.verdict(cl.check_gns_pattern(ctx, w, cfg.lam, cfg.N))
    elif name == "reduced-word":
        V1 = um.build_irreducible(rs, (1, 0))
        V2 = um.build_irreducible(rs, (0, 1))
        els = [ca.coeff(V1, k, 0) for k in range(3)] + [ca.coeff(V2, k, 0) for k in range(2)]
        rep.verdict(cl.check_reduced_word_independence(rs, (1, 2, 1), (2, 1, 2), els, cfg.N))


def cmd_suite(cfg, rep):
    counts: dict[str, list[int]] = {}
    for name, params in _suite_matrix():
        sub = RunConfig(N=cfg.N, q=cfg.q, backend="float", **params)
        part = Report()
        if name in COMMANDS:
            COMMANDS[name](sub, part)
        else:
            _suite_extra(name, sub, part)
        rep.lines.extend(part.lines)
        rep.status = max(rep.status, part.status)
        for line in part.lines:
            if "verdict=" in line:
                key = name
                c = counts.setdefault(key, [0, 0])
                c[1] += 1
                c[0] += "verdict=pass" in line
    for key in sorted(counts):
        p, t = counts[key]
        rep.add(record(summary=key, passed=p, total=t))


COMMANDS = {
    "roots": cmd_roots,
    "weyl": cmd_weyl,
    "module": cmd_module,
    "tensor": cmd_tensor,
    "verify-commutation": cmd_verify_commutation,
    "verify-unitarity": cmd_verify_unitarity,
    "spectrum": cmd_spectrum,
    "verify-part1": cmd_verify_part1,
    "verify-h1": cmd_verify_h1,
    "verify-inequivalence": cmd_verify_inequivalence,
    "verify-restriction": cmd_verify_restriction,
    "gelfand": cmd_gelfand,
    "prv": cmd_prv,
    "factorize": cmd_factorize,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qflag", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--type", default="A", help="Cartan type letter")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--S", default="", help="comma-separated Levi nodes")
    p.add_argument("--sigma", default=None, help="comma-separated reduced word, 'e' for identity")
    p.add_argument("--sigma2", default=None)
    p.add_argument("--lambda", dest="lam", default=None, help="fundamental-weight coefficients")
    p.add_argument("--lambda2", default=None)
    p.add_argument("--N", type=int, default=fr.DEFAULT_N, help="truncation level")
    p.add_argument("--q", default="1/2", help="rational deformation parameter in (0,1)")
    p.add_argument("--backend", choices=("float", "exact"), default="float")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--output", default=None, help="also write the report to this path")
    return p


def run(command: str, cfg: RunConfig) -> tuple[int, list[str]]:
    rep = Report()
    try:
        COMMANDS[command](cfg, rep)
    except ConfigError as exc:
        return EXIT_CONFIG, [record(error="config", message=str(exc))]
    except (um.ModuleTooLarge, ca.IndeterminateError, wy.GroupTooLarge, fr.TruncationError) as exc:
        return EXIT_INDETERMINATE, rep.lines + [record(status="indeterminate", reason=type(exc).__name__,
                                                       message=str(exc))]
    return rep.status, rep.lines


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = make_config(ns)
    except ConfigError as exc:
        print(record(error="config", message=str(exc)))
        return EXIT_CONFIG
    status, lines = run(ns.command, cfg)
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
