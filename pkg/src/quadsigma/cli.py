"""Batch driver: sweep fields and prime sets through ``verify_field``.

Exit status: 0 when every check passes, 1 on any failed identity, 2 on a
usage or envelope error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Optional, Sequence

from .localsym import SigmaSet, is_squarefree, sigma_prime_set
from .norm1kit import (
    VerificationReport,
    alpha_beta_r0_check,
    ambiguous_class_order,
    h_minus_one_order,
    norm_image,
    relative_brauer_order,
    verify_field,
    w_over_n_order,
    w_subgroup,
)
from .quadfield import MAX_ABS_D, MAX_SIGMA_PRIME, class_group, field, s_class_group, s_unit_group

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    d_values: tuple[int, ...]
    sigma_policy: str = "minimal"
    sigma_primes: tuple[int, ...] = ()
    output_format: str = "table"
    fail_fast: bool = False
    parallelism: int = 1
    timings: bool = False

    def sigma_for(self, d: int) -> SigmaSet:
        if self.sigma_policy == "minimal":
            return SigmaSet.minimal(d)
        if self.sigma_policy == "minimal_plus":
            return SigmaSet.of(set(SigmaSet.minimal(d).finite_primes) | set(self.sigma_primes))
        return SigmaSet.of(self.sigma_primes)

    def pairs(self) -> list[tuple[int, SigmaSet]]:
        """Validated (d, sigma) pairs in (d, sigma) order."""
        out = []
        for d in self.d_values:
            if d in (0, 1) or not is_squarefree(d):
                raise UsageError(f"d = {d} is not a squarefree integer other than 0, 1")
            if abs(d) > MAX_ABS_D:
                raise UsageError(f"|d| = {abs(d)} exceeds the supported bound {MAX_ABS_D}")
            try:
                sigma = self.sigma_for(d)
                sigma.validate(d)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            D = 4 * d if d % 4 != 1 else d
            big = [p for p in sigma.finite_primes if p > MAX_SIGMA_PRIME and D % p]
            if big:
                raise UsageError(f"primes {big} exceed the supported bound {MAX_SIGMA_PRIME}")
            out.append((d, sigma))
        return sorted(out, key=lambda ds: (ds[0], ds[1].finite_primes))


def _parse_primes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"bad prime list {text!r}") from exc


def _parse_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"range must look like LO..HI, got {text!r}")
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc
    return list(range(lo_i, hi_i + 1))


def _merge_dash_values(argv: Sequence[str]) -> list[str]:
    # "--d-range -150..150" would otherwise be read as two options
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--d", "--d-range"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadsigma", description=__doc__.splitlines()[0])
    p.add_argument("--d", action="append", default=[], help="discriminant kernel d (repeatable, comma lists allowed)")
    p.add_argument("--d-range", help="inclusive range LO..HI; non-squarefree values and 0, 1 are skipped")
    p.add_argument("--sigma", nargs="+", default=["minimal"], metavar="POLICY",
                   help="minimal | minimal_plus P1,P2,... | explicit P1,P2,...")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p.add_argument("--fail-fast", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--explain", action="store_true", help="print the derivation for each pair instead of reports")
    p.add_argument("--timings", action="store_true", help="fill in ms_elapsed (otherwise left empty)")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    d_values: list[int] = []
    for item in args.d:
        try:
            d_values += [int(t) for t in item.split(",") if t.strip()]
        except ValueError as exc:
            raise UsageError(f"bad --d value {item!r}") from exc
    if args.d_range:
        d_values += [d for d in _parse_range(args.d_range) if d not in (0, 1) and is_squarefree(d)]
    if not d_values:
        raise UsageError("give at least one --d or a --d-range")
    policy, *rest = args.sigma
    if policy not in ("minimal", "minimal_plus", "explicit"):
        raise UsageError(f"unknown sigma policy {policy!r}")
    if policy == "minimal" and rest:
        raise UsageError("the minimal policy takes no primes")
    if policy != "minimal" and len(rest) != 1:
        raise UsageError(f"{policy} needs one comma-separated prime list")
    primes = _parse_primes(rest[0]) if rest else ()
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    return RunConfig(
        d_values=tuple(dict.fromkeys(d_values)),
        sigma_policy=policy,
        sigma_primes=primes,
        output_format=args.format,
        fail_fast=args.fail_fast,
        parallelism=args.jobs,
        timings=args.timings,
    )


def _verify(pair: tuple[int, SigmaSet]) -> VerificationReport:
    return verify_field(*pair)


TABLE_COLUMNS = ("d", "sigma", "rho", "e", "order_c_sigma", "order_c_fixed", "order_h_minus1",
                 "order_w_over_n", "coker_lambda", "brauer_order")


def _format_table(reports: list[VerificationReport]) -> str:
    heads = list(TABLE_COLUMNS) + ["checks"]
    rows = []
    for r in reports:
        flags = "".join("+" if getattr(r, f"pass_n{i}") else "x" for i in range(1, 7))
        rows.append([str(getattr(r, c)) for c in TABLE_COLUMNS] + [flags])
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(heads)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(heads, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in rows]
    return "\n".join(lines) + "\n"


def emit(reports: list[VerificationReport], fmt: str, timings: bool, out) -> None:
    if fmt == "json":
        for r in reports:
            out.write(r.to_json(timings) + "\n")
    elif fmt == "csv":
        out.write(VerificationReport.csv_header())
        for r in reports:
            out.write(r.to_csv_row(timings))
    else:
        out.write(_format_table(reports))


def run(config: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    pairs = config.pairs()
    reports: list[VerificationReport] = []
    if config.parallelism == 1:
        for pair in pairs:
            r = _verify(pair)
            reports.append(r)
            if config.fail_fast and not r.passed:
                break
    else:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            futures = [pool.submit(_verify, pair) for pair in pairs]
            for fut in as_completed(futures):
                r = fut.result()
                reports.append(r)
                if config.fail_fast and not r.passed:
                    for f in futures:
                        f.cancel()
                    break
    reports.sort(key=lambda r: (r.d, tuple(int(t) for t in r.sigma.strip("{}").split(",")[1:])))
    emit(reports, config.output_format, config.timings, out)
    failed = sum(1 for r in reports if not r.passed)
    err.write(f"{len(reports)} pairs checked, {len(reports) - failed} passed, {failed} failed\n")
    return EXIT_FAIL if failed else EXIT_OK


def explain(d: int, sigma: SigmaSet, out=None) -> None:
    """Print every intermediate object for one pair."""
    out = out or sys.stdout
    w = out.write
    K = field(d)
    C = class_group(K)
    w(f"field {K}: D = {K.D}, {K.signature}, {K.torsion_order} roots of unity\n")
    w(f"Sigma = {sigma}\n")
    w(f"reduced forms ({C.narrow_order} narrow classes): {', '.join(str(f) for f in C.forms)}\n")
    w(f"class group C_K = {C.group}\n")
    if K.is_real:
        from .quadfield import fundamental_unit

        eps = fundamental_unit(K)
        w(f"fundamental unit {eps}, norm {eps.norm()}\n")
    sc = s_class_group(K, sigma)
    w(f"Sigma-class group = {sc.group}\n")
    U = s_unit_group(K, sigma)
    w(f"places above Sigma: {', '.join(str(P) for P in U.places)}\n")
    w("S-unit generators:\n")
    for g in U.generators():
        w(f"  {g}  norm {g.norm()}\n")
    w(f"valuation matrix: {U.valuation_matrix.to_rows()}\n")
    places, rho = sigma_prime_set(d, sigma)
    prof = w_subgroup(d, sigma)
    prof.norm_image_basis = norm_image(U, prof.classes)
    labels = prof.classes.basis_labels
    w(f"Sigma' = {{{','.join(str(v) for v in places)}}}, rho = {rho}\n")
    w("Hilbert matrix (rows Sigma', columns " + " ".join(str(g) for g in labels) + "):\n")
    for v, row in zip(places, prof.hilbert):
        w(f"  {str(v):>4}: {' '.join(str(x) for x in row)}\n")
    w(f"W basis: {[prof.classes.element(b) for b in prof.W_basis]}, e = {prof.e}\n")
    w(f"norm image basis: {[prof.classes.element(b) for b in prof.norm_image_basis]}\n")
    wn = w_over_n_order(prof)
    fixed = ambiguous_class_order(K, sigma)
    hm1 = h_minus_one_order(K, sigma)
    br = relative_brauer_order(prof)
    ab = alpha_beta_r0_check(K, sigma, U)
    coker = prof.coker_lambda_order
    w(f"N1 |W/N| = {wn}  vs  |Coker lambda| = 2^(rho-e) = {coker}\n")
    w(f"N2 |C_fixed| = {fixed}  vs  |W/N| = {wn}\n")
    w(f"N3 |H^-1| = {hm1}  vs  |Coker lambda| = {coker}\n")
    w(f"N4 |C_Sigma| = {sc.group.order()}  divisible by  {coker}\n")
    w(f"N5 relative Brauer order = {br}  vs  2^rho = {2 ** rho}\n")
    w(f"N6 beta0.alpha0 = 2: {ab.beta_alpha_is_square}, alpha0.beta0 = 2: {ab.alpha_beta_is_square}"
      f" (norm-one group {ab.norm_one}, unit quotient {ab.quotient})\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_merge_dash_values(argv))
    try:
        config = config_from_args(args)
        pairs = config.pairs()
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"quadsigma: error: {exc}\n")
        return EXIT_USAGE
    if args.explain:
        for d, sigma in pairs:
            explain(d, sigma)
        return EXIT_OK
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
