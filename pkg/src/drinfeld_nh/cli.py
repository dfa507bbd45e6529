"""Command-line entry point ``dnh``.

Exit codes: 0 success, 1 a verified identity failed, 2 precision or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import Config, ConfigError
from .expr import FormSyntaxError, parse_form
from .field import field, format_ratf
from .forms import (GradedForm, InconsistentTruncation, generators, j_invariant, membership)
from .nearly import (NHForm, NotNearlyHolomorphic, decompose, inverse_iota, iota, maass_shimura,
                     to_graded)
from .numerics import (NumericsError, PuiseuxNum, QuadExtElem, default_spec, eval_useries,
                       ext_field, fixed_field_test, inert_point, psi_apply, u_eval)
from .operators import rc_bracket, u_operator
from .useries import PrecisionError, USeries
from . import verify as verify_mod

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

GENERATORS = ("E", "g", "h", "Delta", "j")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# output


def _series_payload(s: USeries) -> dict:
    return s.to_json()


def _emit(cfg: Config, payload, table_lines: list[str] | None = None) -> None:
    if cfg.format == "json" or table_lines is None:
        print(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))
    else:
        for line in table_lines:
            print(line)


def _series_table(s: USeries) -> list[str]:
    return [f"u^{e}\t{format_ratf(s.coeff(e))}" for e in range(s.val, s.prec)]


# ---------------------------------------------------------------------------
# commands


def _form(cfg: Config, text: str) -> GradedForm:
    return parse_form(field(cfg.q), text)


def _modular_series(cfg: Config, text: str) -> tuple[USeries, int, int]:
    f = _form(cfg, text)
    if any(e[2] or e[3] or e[4] for e in f.terms):
        raise UsageError(f"{text!r} is not a polynomial in g and h")
    return f.expand(cfg.prec), f.weight, f.type


def cmd_expand(cfg: Config, args) -> int:
    F = field(cfg.q)
    name = args.generator
    if name == "j":
        s = j_invariant(F, cfg.prec)
    elif name in GENERATORS:
        tab = generators(F, cfg.prec)
        s = {"E": lambda: tab.E().truncate(cfg.prec), "g": tab.g, "h": tab.h, "Delta": tab.delta}[name]()
    else:
        s = _form(cfg, name).expand(cfg.prec)
    _emit(cfg, {"q": cfg.q, "form": name, "series": _series_payload(s)}, _series_table(s))
    return EXIT_OK


def _parse_ops(text: str) -> list[int]:
    orders = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, _, r = part.partition(":")
        if name != "delta":
            raise UsageError(f"unknown operator {name!r} (use delta:r)")
        try:
            orders.append(int(r or 1))
        except ValueError:
            raise UsageError(f"bad order in {part!r}") from None
    return orders


def cmd_apply(cfg: Config, args) -> int:
    """Apply a chain of Maass–Shimura operators; report the ι-image and the E₂-form."""
    Fm = _nh_from_form(cfg, args.form)
    for r in _parse_ops(args.ops):
        Fm = maass_shimura(Fm, Fm.weight, r)
    qm = iota(Fm)
    nh = to_graded(Fm)
    payload = {"weight": Fm.weight, "type": Fm.type, "quasi_modular": str(qm), "nearly_holomorphic": str(nh)}
    _emit(cfg, payload, [f"weight {Fm.weight} type {Fm.type}", f"ι-image: {qm}", f"in E, Y: {nh}"])
    return EXIT_OK


def cmd_bracket(cfg: Config, args) -> int:
    f, k, m1 = _modular_series(cfg, args.f)
    g, w, m2 = _modular_series(cfg, args.g)
    r = args.r
    br = rc_bracket(f, k, g, w, r)
    W, T = k + w + 2 * r, m1 + m2 + r
    P = membership(br, W, T)
    payload = {"weight": W, "type": T % (cfg.q - 1) if cfg.q > 2 else 0,
               "form": None if P is None else str(P), "series": _series_payload(br)}
    _emit(cfg, payload, [f"[{args.f}, {args.g}]_{r} = {P}"] + _series_table(br)[:10])
    return EXIT_OK if P is not None else EXIT_FAIL


def cmd_uop(cfg: Config, args) -> int:
    f, k0, m = _modular_series(cfg, args.form)
    k = args.k if args.k is not None else k0
    res = u_operator(f, k, args.r)
    W, T = k0 * args.r + 2 * args.r, m * args.r + args.r
    P = membership(res, W, T) if k == k0 else None
    payload = {"k": k, "r": args.r, "zero": res.is_zero(), "form": None if P is None else str(P),
               "series": _series_payload(res)}
    _emit(cfg, payload, [f"U_{k}^{args.r}({args.form}) = {P if P is not None else res}"])
    return EXIT_OK


def _nh_from_form(cfg: Config, text: str) -> NHForm:
    """Forms with Y are taken literally in E, Y; forms without Y are read through ι⁻¹."""
    F = field(cfg.q)
    P = _form(cfg, text)
    if P.degree("X"):
        raise UsageError("X may not occur in an input form")
    if P.degree("Y"):
        layers = [P.coefficient_in("Y", mu) for mu in range(P.degree("Y") + 1)]
        coeffs = {mu: c.expand(cfg.prec) for mu, c in enumerate(layers) if not c.is_zero()}
        return NHForm(F, coeffs, P.weight, P.type)
    return inverse_iota(P, cfg.prec)


def cmd_decompose(cfg: Config, args) -> int:
    Fm = _nh_from_form(cfg, args.form)
    if args.delta:
        Fm = maass_shimura(Fm, Fm.weight, args.delta)
    layers = decompose(Fm)
    strs = [str(x) for x in layers]
    _emit(cfg, strs, [f"E₂^{j}: {s}" for j, s in enumerate(strs)])
    return EXIT_OK


def cmd_membership(cfg: Config, args) -> int:
    F = field(cfg.q)
    if args.series:
        with open(args.series, encoding="utf-8") as fh:
            s = USeries.from_json(F, json.load(fh))
    else:
        s = _form(cfg, args.form).expand(cfg.prec)
    P = membership(s, args.k, args.m)
    _emit(cfg, {"member": P is not None, "form": None if P is None else P.to_json()},
          [f"member: {P is not None}", f"form: {P}"])
    return EXIT_OK if P is not None else EXIT_FAIL


def cmd_verify(cfg: Config, args) -> int:
    vcfg = verify_mod.VerifyConfig(q=cfg.q, prec=cfg.prec, vdigits=cfg.vdigits, seed=cfg.seed)
    results = verify_mod.run(cfg.suite, vcfg)
    report = [r.to_json() for r in results]
    lines = [f"seed {cfg.seed}"] + [f"{r.status.upper():4}  {r.id}  ({r.anchor})" for r in results]
    if cfg.format == "json":
        print(f"seed {cfg.seed}", file=sys.stderr)
        print(json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True, default=str))
    else:
        print("\n".join(lines))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _point(cfg: Config, text: str) -> PuiseuxNum:
    q = cfg.q
    K = ext_field(q, 2)
    e = q - 1
    xi = PuiseuxNum.const(K, q, inert_point(q, K), e)
    if text == "xi":
        return xi
    if text.startswith("xi+"):
        shift = parse_form(field(q), text[3:])
        if shift.terms.keys() - {(0, 0, 0, 0, 0)}:
            raise UsageError("shift must be a polynomial in theta")
        c = shift.terms.get((0, 0, 0, 0, 0))
        num = PuiseuxNum.from_poly(c.num, K, e) if c is not None else PuiseuxNum.zero(K, q, e)
        return xi + num
    data = json.loads(text)
    return PuiseuxNum.from_json(data).with_e(e)


def cmd_eval(cfg: Config, args) -> int:
    z = _point(cfg, args.point)
    u0 = u_eval(z, cfg.vdigits)
    if args.form:
        s = _form(cfg, args.form).expand(cfg.prec)
        val = eval_useries(s, u0, cfg.vdigits)
    else:
        val = u0
    _emit(cfg, {"point": args.point, "form": args.form or "u", "value": val.to_json()},
          [f"{args.form or 'u'}({args.point}) = {val!r}"])
    return EXIT_OK


def _quad(cfg: Config, spec, text: str) -> QuadExtElem:
    q = cfg.q
    K = ext_field(q, 2)
    zero = PuiseuxNum.zero(K, q)
    if text in ("sqrt-theta", "gen"):
        b = PuiseuxNum.theta_power(K, q, 1) if spec.kind == "odd" and text == "sqrt-theta" else PuiseuxNum.const(K, q, 1)
        return QuadExtElem(zero, b, spec)
    if text == "xi":
        return QuadExtElem(PuiseuxNum.const(K, q, inert_point(q, K)), zero, spec)
    data = json.loads(text)
    return QuadExtElem(PuiseuxNum.from_json(data["a"]), PuiseuxNum.from_json(data["b"]), spec)


def cmd_psi(cfg: Config, args) -> int:
    spec = default_spec(cfg.q, args.variant)
    z = _quad(cfg, spec, args.element)
    w = psi_apply(spec, z)
    payload = {"variant": spec.variant, "psi": {"a": w.a.to_json(), "b": w.b.to_json()},
               "fixed": fixed_field_test(spec, z)}
    _emit(cfg, payload, [f"ψ({args.element}) = {w!r}", f"fixed: {payload['fixed']}"])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, help="field size q (prime power)")
    common.add_argument("--prec", type=int, help="u-expansion precision N")
    common.add_argument("--vdigits", type=int, help="numeric truncation V in θ-digits")
    common.add_argument("--seed", type=int, help="seed for randomized batteries")
    common.add_argument("--format", choices=("json", "table"))
    common.add_argument("--config", help="JSON config file with the same keys as the flags")

    ap = argparse.ArgumentParser(prog="dnh", description="Drinfeld quasi-modular and nearly holomorphic forms")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="u-expansion of a generator or form")
    p.add_argument("generator", help="E, g, h, Delta, j, or a form expression in g, h, E")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("apply", parents=[common], help="apply δ chains to a form")
    p.add_argument("ops", help="comma-separated operators, e.g. delta:2,delta:1")
    p.add_argument("form", help="form in g, h, E (read through ι⁻¹) or in g, h, E2, Y")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("bracket", parents=[common], help="Rankin–Cohen bracket of two modular forms")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--r", type=int, default=1)
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("uop", parents=[common], help="U_k^r operator")
    p.add_argument("form")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--k", type=int, help="weight parameter (defaults to the form's weight)")
    p.set_defaults(func=cmd_uop)

    p = sub.add_parser("decompose", parents=[common], help="E₂-layers of a nearly holomorphic form")
    p.add_argument("form", help="form in g, h, E2 (or E, Y)")
    p.add_argument("--delta", type=int, default=0, help="apply δ^r first")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("membership", parents=[common], help="express a series in g, h")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--series", help="USeries JSON file")
    src.add_argument("--form")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", choices=verify_mod.SUITES + ("all",))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", parents=[common], help="evaluate u or a form at a point")
    p.add_argument("point", help="xi, xi+<poly in theta>, or PuiseuxNum JSON")
    p.add_argument("--form")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("psi", parents=[common], help="apply ψ to a quadratic element")
    p.add_argument("element", help="sqrt-theta, gen, xi, or {\"a\": …, \"b\": …} JSON")
    p.add_argument("--variant", choices=("even", "odd-I", "odd-II"))
    p.set_defaults(func=cmd_psi)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    overrides = {k: getattr(args, k, None) for k in ("q", "prec", "vdigits", "seed", "format", "suite")}
    try:
        cfg = Config.load(args.config, overrides=overrides)
        return args.func(cfg, args)
    except (ConfigError, UsageError, FormSyntaxError, PrecisionError, InconsistentTruncation,
            NumericsError, NotNearlyHolomorphic, json.JSONDecodeError) as exc:
        print(f"dnh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"dnh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
