"""Command-line entry point: parse, translate, saturate, report.

Validity of a formula is decided by refuting its negation; satisfiability
translates the formula directly.  Output is one verdict line (VALID,
NOT VALID, SAT, UNSAT, or UNKNOWN), optionally preceded by the translated
clause set and followed by a countermodel.  Exit status: 0 when a verdict
was produced, 2 on input errors, 3 when a resource limit was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .calculus import LogicSpec, LogicSpecError
from .formula import Formula, Not, ParseError, agents_of, parse
from .saturation import (Limits, ResourceLimit, Saturated, Unsatisfiable,
                         saturate)
from .semantics import bounded_model_search
from .snf import (ClauseFormatError, ClauseSet, ORIGIN_DEFINITION,
                  clause_set_literals, definition_clauses, parse_clause_lines,
                  to_snf)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_RESOURCE_LIMIT = 3


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "valid"                      # "valid" or "sat"
    logic: LogicSpec = field(default_factory=LogicSpec)
    formula_text: str | None = None
    formula_path: str | None = None
    snf_path: str | None = None
    agent_count: int | None = None
    emit_snf: bool = False
    proof_out: str | None = None
    oracle_check: bool = False
    model_out: str | None = None
    max_worlds: int = 2
    limits: Limits = field(default_factory=Limits)
    all_rules: bool = False


def _arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="modalres",
        description="Resolution prover for multimodal logics of confluence.")
    p.add_argument("formula", nargs="?",
                   help="formula to test, e.g. '[1]p -> p'")
    p.add_argument("-m", "--mode", choices=("valid", "sat"), default="valid",
                   help="test validity (refute the negation) or "
                        "satisfiability (default: valid)")
    p.add_argument("-l", "--logic", default="",
                   help="per-agent axiom families, e.g. '1:T,5;2:K'; "
                        "families: K T D B Ban F 5 G1 G0111 "
                        "(unlisted agents are K)")
    p.add_argument("--agents", type=int, default=None,
                   help="declared agent count (default: inferred)")
    p.add_argument("--input", dest="formula_path", metavar="FILE",
                   help="read the formula from a file")
    p.add_argument("--input-snf", dest="snf_path", metavar="FILE",
                   help="read a clause set directly, bypassing translation")
    p.add_argument("--emit-snf", action="store_true",
                   help="print the clause set handed to the prover")
    p.add_argument("--proof-out", metavar="FILE",
                   help="write the refutation trace to a file")
    p.add_argument("--oracle-check", action="store_true",
                   help="on a satisfiable verdict, search for a bounded "
                        "countermodel and print it")
    p.add_argument("--model-out", metavar="FILE",
                   help="write the countermodel as JSON (with --oracle-check)")
    p.add_argument("--max-worlds", type=int, default=2,
                   help="world bound for the countermodel search (default 2)")
    p.add_argument("--max-clauses", type=int, default=Limits.max_clauses,
                   help="clause limit before giving up")
    p.add_argument("--max-seconds", type=float, default=Limits.max_seconds,
                   help="time limit before giving up")
    p.add_argument("--all-rules", action="store_true",
                   help="enable the full per-family rule tables "
                        "(experimental; the defaults are complete)")
    return p


def build_config(argv: list[str]) -> RunConfig:
    ns = _arg_parser().parse_args(argv)
    sources = [s for s in (ns.formula, ns.formula_path, ns.snf_path)
               if s is not None]
    if len(sources) != 1:
        raise InputError("exactly one of a formula argument, --input or "
                         "--input-snf is required")
    try:
        logic = LogicSpec.parse(ns.logic, all_rules=ns.all_rules)
    except LogicSpecError as e:
        raise InputError(str(e)) from e
    return RunConfig(
        mode=ns.mode, logic=logic, formula_text=ns.formula,
        formula_path=ns.formula_path, snf_path=ns.snf_path,
        agent_count=ns.agents, emit_snf=ns.emit_snf, proof_out=ns.proof_out,
        oracle_check=ns.oracle_check, model_out=ns.model_out,
        max_worlds=ns.max_worlds,
        limits=Limits(ns.max_clauses, ns.max_seconds),
        all_rules=ns.all_rules)


def _load_formula(config: RunConfig) -> Formula:
    text = config.formula_text
    if config.formula_path is not None:
        try:
            with open(config.formula_path) as fh:
                text = fh.read()
        except OSError as e:
            raise InputError(f"cannot read {config.formula_path}: {e}") from e
    try:
        f = parse(text, config.agent_count)
    except ParseError as e:
        raise InputError(f"parse error: {e}") from e
    if config.agent_count is None:
        limit = max(agents_of(f) | set(config.logic.agents()), default=1)
    else:
        limit = config.agent_count
    bad = sorted(a for a in config.logic.agents() if a > limit)
    if bad and config.agent_count is not None:
        raise InputError(f"logic mentions agent {bad[0]} beyond the declared "
                         f"count {limit}")
    return f


def prepare_clauses(config: RunConfig) -> ClauseSet:
    """Build the prover input: translated (or loaded) clauses plus the
    definition clauses the selected logic needs."""
    cs = ClauseSet()
    if config.snf_path is not None:
        try:
            with open(config.snf_path) as fh:
                clauses = parse_clause_lines(fh.read())
        except OSError as e:
            raise InputError(f"cannot read {config.snf_path}: {e}") from e
        except ClauseFormatError as e:
            raise InputError(str(e)) from e
        for c in clauses:
            cs.add(c)
    else:
        f = _load_formula(config)
        if config.mode == "valid":
            f = Not(f)
        cs = to_snf(f)
    base = cs.clauses()
    agents_present = cs.agents()
    need = sorted(a for a in agents_present
                  if config.logic.needs_definitions(a))
    if need:
        cs.extend(definition_clauses(clause_set_literals(base), set(need)))
    return cs


def run(config: RunConfig, out=None) -> int:
    """Execute one prover run; prints the report and returns the exit
    status."""
    out = out if out is not None else sys.stdout
    try:
        cs = prepare_clauses(config)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if config.emit_snf:
        print(cs.render(), file=out)
    verdict = saturate(cs, config.logic, config.limits)
    if isinstance(verdict, ResourceLimit):
        print(f"UNKNOWN (resource limit: {verdict.reason})", file=out)
        return EXIT_RESOURCE_LIMIT
    if isinstance(verdict, Unsatisfiable):
        print("VALID" if config.mode == "valid" else "UNSAT", file=out)
        if config.proof_out:
            with open(config.proof_out, "w") as fh:
                fh.write(verdict.proof.render() + "\n")
        return EXIT_OK
    print("NOT VALID" if config.mode == "valid" else "SAT", file=out)
    if config.oracle_check:
        model = bounded_model_search(cs.clauses(), config.logic,
                                     config.max_worlds)
        if model is None:
            print(f"no model <= {config.max_worlds} worlds", file=out)
        else:
            print(model.render(), file=out)
            if config.model_out:
                with open(config.model_out, "w") as fh:
                    json.dump(model.to_dict(), fh, indent=2)
                    fh.write("\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    try:
        config = build_config(argv)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
