"""Problem ingestion, bound construction, CLI and CSV benchmark harness.

Input formats: a TPTP CNF subset (unit clauses over equality/disequality
literals only) and a plain equation list (one ``s = t`` per line). The bound
is built by nesting the non-constant symbols in one argument up to a chosen
depth, filling the remaining argument positions with the first constant.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .constraints import Bound, EnumerationBudgetExceeded, enumerate_ground_terms
from .engine import Budget, SaturationResult, ground_partition, init_state, query_equal, saturate
from .ground import GroundPartition, cc_saturate, ground_equations
from .terms import App, Signature, Symbol, Term, Var, is_ground, render_term

CSV_HEADER = [
    "problem",
    "status_ccx",
    "time_ccx_ms",
    "classes_ccx",
    "status_cc",
    "time_cc_ms",
    "classes_cc",
]


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class TimeLimitExceeded(Exception):
    pass


@dataclass
class Clause:
    """One parsed unit literal; negated means it came in as a disequation."""

    lhs: Term
    rhs: Term
    negated: bool


@dataclass
class Problem:
    name: str
    signature: Signature
    clauses: list[Clause]
    ineq_policy: str = "drop"
    var_names: dict[int, str] = field(default_factory=dict)

    @property
    def equations(self) -> list[tuple[Term, Term]]:
        out = []
        for c in self.clauses:
            if c.negated and self.ineq_policy == "drop":
                continue
            out.append((c.lhs, c.rhs))
        return out

    @property
    def notes(self) -> list[str]:
        action = "dropped inequation" if self.ineq_policy == "drop" else "inequation as equation"
        return [
            f"{action}: {render_term(c.lhs, self.var_names)} != "
            f"{render_term(c.rhs, self.var_names)}"
            for c in self.clauses
            if c.negated
        ]


# --- tokenizer -------------------------------------------------------------

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    ",": "COMMA",
    ".": "DOT",
    "~": "TILDE",
    "|": "PIPE",
}


def _tokenize(text: str):
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%" or ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "!" and i + 1 < n and text[i + 1] == "=":
            yield ("NEQ", "!=", line, col)
            i += 2
            col += 2
            continue
        if ch == "=":
            yield ("EQ", "=", line, col)
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            yield (_PUNCT[ch], ch, line, col)
            i += 1
            col += 1
            continue
        if ch == "'":
            j = text.find("'", i + 1)
            if j < 0:
                raise ParseError("unterminated quoted name", line, col)
            yield ("NAME", text[i + 1 : j], line, col)
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "VARIABLE" if word[0].isupper() or word[0] == "_" else "NAME"
            yield (kind, word, line, col)
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    yield ("EOF", "", line, col)


class _Parser:
    """Recursive-descent parser shared by the TPTP subset and equation lists."""

    def __init__(self, text: str) -> None:
        self.tokens = list(_tokenize(text))
        self.pos = 0
        self.arities: dict[str, int] = {}
        self.symbol_order: list[str] = []
        self.var_ids: dict[str, int] = {}
        self.var_names: dict[int, str] = {}
        self.next_var = 0
        self.clause_scope: dict[str, int] = {}

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind: str | None = None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2], tok[3])
        self.pos += 1
        return tok

    def fresh_scope(self) -> None:
        self.clause_scope = {}

    def variable(self, name: str) -> Term:
        if name not in self.clause_scope:
            vid = self.next_var
            self.next_var += 1
            self.clause_scope[name] = vid
            self.var_names[vid] = name
        return Var(self.clause_scope[name])

    def record_symbol(self, name: str, arity: int, line: int, col: int) -> None:
        known = self.arities.get(name)
        if known is None:
            self.arities[name] = arity
            self.symbol_order.append(name)
        elif known != arity:
            raise ParseError(
                f"symbol {name} used with arity {arity}, previously {known}", line, col
            )

    def term(self) -> Term:
        kind, value, line, col = self.take()
        if kind == "VARIABLE":
            return self.variable(value)
        if kind != "NAME":
            raise ParseError(f"expected a term, found {value!r}", line, col)
        args: list[Term] = []
        if self.peek()[0] == "LPAREN":
            self.take("LPAREN")
            args.append(self.term())
            while self.peek()[0] == "COMMA":
                self.take("COMMA")
                args.append(self.term())
            self.take("RPAREN")
        self.record_symbol(value, len(args), line, col)
        return App(Symbol(value, len(args)), tuple(args))

    def literal(self) -> Clause:
        negated = False
        if self.peek()[0] == "TILDE":
            self.take("TILDE")
            negated = True
        wrapped = self.peek()[0] == "LPAREN"
        if wrapped:
            self.take("LPAREN")
        lhs = self.term()
        kind, value, line, col = self.take()
        if kind == "NEQ":
            negated = not negated
        elif kind != "EQ":
            raise ParseError(f"expected '=' or '!=', found {value!r}", line, col)
        rhs = self.term()
        if wrapped:
            self.take("RPAREN")
        return Clause(lhs, rhs, negated)

    def signature(self) -> Signature:
        return Signature(tuple(Symbol(n, self.arities[n]) for n in self.symbol_order))


def parse_tptp_ueq(text: str, name: str = "problem", ineq: str = "drop") -> Problem:
    """Parse the TPTP CNF unit-equality subset.

    Only ``cnf`` clauses with a single ``=``/``!=`` literal are accepted;
    ``fof``, ``include`` and multi-literal clauses are rejected with a
    diagnostic. Disequations are handled by the given policy.
    """
    p = _Parser(text)
    clauses: list[Clause] = []
    while p.peek()[0] != "EOF":
        kind, value, line, col = p.take()
        if kind != "NAME" or value != "cnf":
            if value in ("fof", "tff", "thf", "include"):
                raise ParseError(f"{value!r} is not supported, only cnf unit equality", line, col)
            raise ParseError(f"expected 'cnf', found {value!r}", line, col)
        p.take("LPAREN")
        p.take()  # clause name (NAME or VARIABLE spelling, not semantic)
        p.take("COMMA")
        p.take("NAME")  # role
        p.take("COMMA")
        p.fresh_scope()
        clause = p.literal()
        nxt = p.peek()
        if nxt[0] == "PIPE":
            raise ParseError("non-unit clause: only unit equality is supported", nxt[2], nxt[3])
        p.take("RPAREN")
        p.take("DOT")
        clauses.append(clause)
    return Problem(name, p.signature(), clauses, ineq, p.var_names)


def parse_equation_list(text: str, name: str = "problem", ineq: str = "drop") -> Problem:
    """Parse the plain format: one ``s = t`` (or ``s != t``) per line."""
    p = _Parser(text)
    clauses: list[Clause] = []
    while p.peek()[0] != "EOF":
        p.fresh_scope()
        clauses.append(p.literal())
        if p.peek()[0] == "DOT":
            p.take("DOT")
    return Problem(name, p.signature(), clauses, ineq, p.var_names)


def format_problem(problem: Problem) -> str:
    """Print a problem back as TPTP cnf clauses; reparsing is the identity."""
    lines = []
    for i, c in enumerate(problem.clauses, start=1):
        op = "!=" if c.negated else "="
        lhs = render_term(c.lhs, problem.var_names)
        rhs = render_term(c.rhs, problem.var_names)
        lines.append(f"cnf(a{i}, axiom, {lhs} {op} {rhs}).")
    return "\n".join(lines) + "\n"


def build_beta(signature: Signature, depth: int) -> Bound:
    """Nest the non-constant symbols in one argument up to the given depth,
    filling the other argument positions with the first-declared constant."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    constants = signature.constants()
    if not constants:
        raise ValueError("cannot build a bound: signature has no constant")
    filler = App(constants[0])
    chain = signature.non_constants()
    beta = filler
    for i in range(depth if chain else 0):
        sym = chain[i % len(chain)]
        beta = App(sym, (beta,) + (filler,) * (sym.arity - 1))
    return Bound.from_beta(beta)


@dataclass
class RunConfig:
    mode: str = "both"  # ccx | cc | both
    depth: int = 4
    ineq: str = "drop"  # drop | eq
    timeout_secs: float = 60.0
    gnd_budget: int = 10**6
    enum_budget: int = 10**6
    csv_path: str | None = None
    dump_path: str | None = None
    queries: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.mode not in ("ccx", "cc", "both"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.ineq not in ("drop", "eq"):
            raise ValueError(f"unknown inequation policy {self.ineq!r}")


def parse_query(text: str, problem: Problem) -> tuple[Term, Term]:
    """Parse a ground ``s = t`` query against the problem's symbol table."""
    p = _Parser(text)
    p.arities = {s.name: s.arity for s in problem.signature}
    p.symbol_order = [s.name for s in problem.signature]
    clause = p.literal()
    if p.peek()[0] != "EOF":
        tok = p.peek()
        raise ParseError("trailing input after query", tok[2], tok[3])
    if clause.negated:
        raise ParseError("queries must use '='", 1, 1)
    if not (is_ground(clause.lhs) and is_ground(clause.rhs)):
        raise ParseError("queries must be ground", 1, 1)
    return clause.lhs, clause.rhs


def _run_ccx(problem: Problem, bound: Bound, config: RunConfig):
    started = time.perf_counter()
    state = init_state(problem.equations, problem.signature, bound)
    result = saturate(state, Budget(max_seconds=config.timeout_secs))
    elapsed_ms = int((time.perf_counter() - started) * 1000)
    status = "done" if result.completed else "timeout"
    return result, status, elapsed_ms


def _run_cc(problem: Problem, bound: Bound, config: RunConfig):
    started = time.perf_counter()
    deadline = started + config.timeout_secs

    def tick() -> None:
        if time.perf_counter() > deadline:
            raise TimeLimitExceeded

    try:
        universe = enumerate_ground_terms(problem.signature, bound, max_terms=config.enum_budget)
        eqs = ground_equations(
            problem.equations, problem.signature, bound, budget=config.enum_budget, tick=tick
        )
        part = cc_saturate(universe, eqs, tick=tick)
        status = "done"
    except TimeLimitExceeded:
        part, status = None, "timeout"
    except EnumerationBudgetExceeded:
        part, status = None, "budget"
    elapsed_ms = int((time.perf_counter() - started) * 1000)
    return part, status, elapsed_ms


def _run_full(config: RunConfig, problem: Problem):
    bound = build_beta(problem.signature, config.depth)
    row = {key: "" for key in CSV_HEADER}
    row["problem"] = problem.name

    result: SaturationResult | None = None
    part: GroundPartition | None = None
    cc_time = 0
    if config.mode in ("ccx", "both"):
        result, status, ms = _run_ccx(problem, bound, config)
        row["status_ccx"] = status
        row["time_ccx_ms"] = str(ms)
        if status == "done":
            row["classes_ccx"] = str(result.final_total)
    if config.mode in ("cc", "both"):
        part, status, cc_time = _run_cc(problem, bound, config)
        row["status_cc"] = status
        row["time_cc_ms"] = str(cc_time)
        if part is not None:
            row["classes_cc"] = str(part.blocks_total)

    if config.csv_path:
        path = Path(config.csv_path)
        new = not path.exists()
        with path.open("a", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
            if new:
                writer.writeheader()
            writer.writerow(row)

    if config.dump_path:
        sections = []
        if result is not None:
            sections.append(result.dump())
        if part is not None:
            sections.append(part.dump(time_ms=cc_time))
        Path(config.dump_path).write_text("\n\n".join(sections) + "\n")

    return row, result, part


def run(config: RunConfig, problem: Problem) -> dict[str, str]:
    """Run the configured engines on one problem and emit the CSV row."""
    row, _, _ = _run_full(config, problem)
    return row


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="ccx",
        description="Saturate equations into constrained congruence classes over a "
        "bounded ground term space; optionally compare with ground congruence closure.",
    )
    ap.add_argument("input", help="problem file (TPTP cnf subset or equation list)")
    ap.add_argument("--format", choices=("auto", "tptp", "eqs"), default="auto")
    ap.add_argument("--mode", choices=("ccx", "cc", "both"), default="both")
    ap.add_argument("--depth", type=int, default=4, help="nesting depth for the bound (default 4)")
    ap.add_argument("--ineq", choices=("drop", "eq"), default="drop",
                    help="drop disequations or turn them into equations")
    ap.add_argument("--timeout-secs", type=float, default=60.0)
    ap.add_argument("--csv", dest="csv_path", default=None, help="append the result row here")
    ap.add_argument("--dump-classes", dest="dump_path", default=None)
    ap.add_argument("--query", action="append", default=[], metavar="'s = t'",
                    help="ground equality to decide after saturation (repeatable)")
    ap.add_argument("--gnd-budget", type=int, default=10**6)
    ap.add_argument("--enum-budget", type=int, default=10**6)
    args = ap.parse_args(argv)

    text = Path(args.input).read_text()
    fmt = args.format
    if fmt == "auto":
        fmt = "tptp" if args.input.endswith(".p") or "cnf(" in text else "eqs"
    name = Path(args.input).stem
    try:
        if fmt == "tptp":
            problem = parse_tptp_ueq(text, name=name, ineq=args.ineq)
        else:
            problem = parse_equation_list(text, name=name, ineq=args.ineq)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2

    config = RunConfig(
        mode=args.mode,
        depth=args.depth,
        ineq=args.ineq,
        timeout_secs=args.timeout_secs,
        gnd_budget=args.gnd_budget,
        enum_budget=args.enum_budget,
        csv_path=args.csv_path,
        dump_path=args.dump_path,
        queries=args.query,
    )

    if args.mode == "cc" and args.query:
        print("queries need the ccx engine; use --mode ccx or both", file=sys.stderr)
        return 2

    row, result, _ = _run_full(config, problem)
    for note in problem.notes:
        print(f"note: {note}")
    print(",".join(row[key] for key in CSV_HEADER))

    if args.query:
        if result is None or not result.completed:
            print("queries skipped: saturation hit the time limit", file=sys.stderr)
            return 1
        for q in args.query:
            s, t = parse_query(q, problem)
            answer = query_equal(result, s, t)
            print(f"query {q}: {'true' if answer else 'false'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
