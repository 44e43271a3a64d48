"""Command-line entry point: ``comgram <verb> ...``.

Every run produces a JSON report (printed with ``--json`` or written with
``--report``) that records the tool version, the seed, SHA-256 hashes of all
inputs, the verdict and its exhaustiveness.  Timings are only included with
``--timings`` so that identical runs yield byte-identical reports.

Exit codes: 0 holds, 1 counterexample / refuted, 2 inconclusive within the
budget, 3 input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .budget import ENV_BUDGET_MS, Deadline
from .core.grammar import binary_size, classify, size
from .core.petri import to_petri_net
from .core.textformat import dump_grammar, parse_grammar
from .core.words import CommutativeWord
from .engine import (
    EnumerationBudget,
    InclusionVerdict,
    decide_inclusion_bruteforce,
    decide_inclusion_semilinear,
    language_bounded,
    parikh_regular,
    reach_bounded,
    word_problem,
)
from .errors import BudgetExceeded, ComgramError, DimensionError, FormulaError, GrammarError, ParseError
from .reduction import compile_sentence, parse_formula
from .semilinear import (
    DiophantineSystem,
    huynh_form,
    loads_semilinear,
    member_semilinear,
    minimal_solutions,
    semilinear_inclusion,
)

EXIT_HOLDS, EXIT_COUNTEREXAMPLE, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3
_INPUT_ERRORS = (ParseError, FormulaError, GrammarError, DimensionError)


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    options: dict
    seed: int = 0
    report: str | None = None
    as_json: bool = False
    timings: bool = False
    budget_ms: float | None = None
    hashes: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, v in self.options.items():
            if key.startswith("max_") and v is not None and v <= 0:
                raise ValueError(f"--{key.replace('_', '-')} must be positive")
        if self.budget_ms is not None and self.budget_ms <= 0:
            raise ValueError("--budget-ms must be positive")


class _Inputs:
    """Reads input files once, remembering their hashes for the report."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    def text(self, path: str) -> str:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
        self.cfg.hashes[path] = hashlib.sha256(data).hexdigest()
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"{path} is not UTF-8") from exc

    def grammar(self, path: str):
        return parse_grammar(self.text(path))

    def semilinear(self, path: str):
        return loads_semilinear(self.text(path))

    def json(self, path: str) -> dict:
        try:
            return json.loads(self.text(path))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc


def _word(text: str) -> CommutativeWord:
    try:
        return CommutativeWord.parse(text)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _vector(text: str) -> tuple[int, ...]:
    try:
        vals = json.loads(text) if text.strip().startswith("[") else [x for x in text.replace(",", " ").split()]
        return tuple(int(x) for x in vals)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad vector {text!r}") from exc


def _trace(trace) -> list[dict] | None:
    if trace is None:
        return None
    return [{"production": str(st.production), "form": str(st.form)} for st in trace]


def _vec_json(v) -> list[str]:
    return [str(x) for x in v]


def _brute_budget(o: dict) -> EnumerationBudget:
    return EnumerationBudget(max_total_count=o["max_length"], max_forms=o["max_forms"])


def _inclusion_payload(v: InclusionVerdict) -> dict:
    return {
        "included": v.included,
        "exhaustive": v.exhaustive,
        "inconclusive": v.inconclusive,
        "method": v.method,
        "counterexample": None if v.counterexample is None else str(v.counterexample),
        "trace": _trace(v.trace),
        "undecided": [str(w) for w in v.undecided],
        "checked": v.checked,
        "details": {k: v.details[k] for k in sorted(v.details)},
    }


def _inclusion_exit(v: InclusionVerdict) -> int:
    if not v.included:
        return EXIT_COUNTEREXAMPLE
    return EXIT_INCONCLUSIVE if v.inconclusive else EXIT_HOLDS


def _include(g, h, o: dict, deadline) -> InclusionVerdict:
    if o["method"] == "semilinear":
        return decide_inclusion_semilinear(g, h, witness_bit_bound=o["bits"], deadline=deadline)
    return decide_inclusion_bruteforce(g, h, budget=_brute_budget(o), membership_forms=o["max_forms"], deadline=deadline)


# --- verbs ------------------------------------------------------------------


def cmd_classify(cfg, io, deadline):
    g = io.grammar(cfg.inputs[0])
    gc = classify(g)
    res = {
        "primary": gc.primary.label,
        "classes": sorted(k.label for k in gc.classes),
        "size": str(size(g)),
        "binary_size": binary_size(g),
        "nonterminals": len(g.nonterminals),
        "terminals": len(g.terminals),
        "productions": len(g.productions),
    }
    return EXIT_HOLDS, res, f"{gc.primary.label} (size {size(g)})"


def cmd_member(cfg, io, deadline):
    g = io.grammar(cfg.inputs[0])
    w = _word(cfg.inputs[1])
    o = cfg.options
    r = word_problem(g, w, max_forms=o["max_forms"], start=o.get("start"), deadline=deadline)
    res = {"word": str(w), "member": r.member, "exhaustive": r.exhaustive, "explored": r.explored, "trace": _trace(r.trace)}
    if r.member:
        return EXIT_HOLDS, res, f"member: {w}"
    if r.exhaustive:
        return EXIT_COUNTEREXAMPLE, res, f"not a member: {w}"
    return EXIT_INCONCLUSIVE, res, f"undecided within budget: {w}"


def cmd_enumerate(cfg, io, deadline):
    g = io.grammar(cfg.inputs[0])
    o = cfg.options
    budget = EnumerationBudget(max_total_count=o["max_length"], max_forms=o["max_forms"], max_depth=o.get("max_depth"))
    ex = (reach_bounded if o["reach"] else language_bounded)(g, budget=budget, deadline=deadline)
    items = ex.sorted()
    res = {
        "mode": "reach" if o["reach"] else "language",
        "count": len(items),
        "exhaustive": ex.exhaustive,
        "complete_in_box": ex.complete_in_box,
        "items": [str(w) for w in items],
    }
    return EXIT_HOLDS, res, "\n".join(str(w) for w in items)


def cmd_inclusion(cfg, io, deadline):
    g, h = io.grammar(cfg.inputs[0]), io.grammar(cfg.inputs[1])
    v = _include(g, h, cfg.options, deadline)
    res = _inclusion_payload(v)
    if not v.included:
        text = f"not included; counterexample: {v.counterexample}"
    else:
        text = "included" + ("" if v.exhaustive else " (within bounds)") + (" but inconclusive" if v.inconclusive else "")
    return _inclusion_exit(v), res, text


def cmd_equivalence(cfg, io, deadline):
    g, h = io.grammar(cfg.inputs[0]), io.grammar(cfg.inputs[1])
    fwd = _include(g, h, cfg.options, deadline)
    res = {"forward": _inclusion_payload(fwd)}
    if not fwd.included:
        res["equivalent"] = False
        return EXIT_COUNTEREXAMPLE, res, f"not equivalent; {fwd.counterexample} is only in the first"
    bwd = _include(h, g, cfg.options, deadline)
    res["backward"] = _inclusion_payload(bwd)
    res["equivalent"] = bwd.included
    res["exhaustive"] = fwd.exhaustive and bwd.exhaustive
    if not bwd.included:
        return EXIT_COUNTEREXAMPLE, res, f"not equivalent; {bwd.counterexample} is only in the second"
    if fwd.inconclusive or bwd.inconclusive:
        return EXIT_INCONCLUSIVE, res, "equivalent within bounds, some words undecided"
    return EXIT_HOLDS, res, "equivalent" + ("" if res["exhaustive"] else " (within bounds)")


def cmd_parikh(cfg, io, deadline):
    g = io.grammar(cfg.inputs[0])
    M = parikh_regular(g, verify=not cfg.options["no_verify"], deadline=deadline)
    res = {"alphabet": list(g.terminals), "semilinear": M.to_json(), "components": len(M.components), "size": M.size}
    return EXIT_HOLDS, res, M.dumps(alphabet=list(g.terminals))


def cmd_huynh(cfg, io, deadline):
    M = io.semilinear(cfg.inputs[0])
    H = huynh_form(M, verify=not cfg.options["no_verify"], deadline=deadline)
    res = {"semilinear": H.to_json(), "components": len(H.components), "size": H.size}
    return EXIT_HOLDS, res, H.dumps()


def cmd_solve_dioph(cfg, io, deadline):
    try:
        D = DiophantineSystem.from_json(io.json(cfg.inputs[0]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad Diophantine system: {exc}") from exc
    hd = minimal_solutions(D, deadline=deadline)
    res = {
        "bases": [_vec_json(b) for b in hd.bases],
        "periods": [_vec_json(p) for p in hd.periods],
        "pottier_bound": str(hd.bound),
        "cardinality_bound_holds": hd.cardinality_bound_holds,
        "semilinear": hd.to_semilinear(D.n).to_json(),
    }
    text = f"{len(hd.bases)} minimal solutions, {len(hd.periods)} homogeneous minimal solutions"
    return EXIT_HOLDS, res, text


def cmd_sl_member(cfg, io, deadline):
    M = io.semilinear(cfg.inputs[0])
    v = _vector(cfg.inputs[1])
    ok = member_semilinear(v, M, deadline)
    res = {"vector": _vec_json(v), "member": ok, "exhaustive": True}
    return (EXIT_HOLDS if ok else EXIT_COUNTEREXAMPLE), res, ("member" if ok else "not a member")


def cmd_sl_incl(cfg, io, deadline):
    M, N = io.semilinear(cfg.inputs[0]), io.semilinear(cfg.inputs[1])
    verify = not cfg.options["no_verify"]
    r = semilinear_inclusion(huynh_form(M, verify, deadline), huynh_form(N, verify, deadline), cfg.options["bits"], deadline)
    res = {
        "included": r.included,
        "exhaustive": r.exhaustive,
        "witness": None if r.witness is None else _vec_json(r.witness),
        "bound": r.bound,
        "candidates": r.candidates,
    }
    if not r.included:
        return EXIT_COUNTEREXAMPLE, res, f"not included; witness {list(r.witness)}"
    return EXIT_HOLDS, res, "included" + ("" if r.exhaustive else f" (no witness of bit size <= {r.bound})")


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def cmd_compile(cfg, io, deadline):
    o = cfg.options
    phi = parse_formula(io.text(o["formula"]))
    art = compile_sentence(phi, c_override=o["c_override"], binary=o["binary"])
    emit = o["emit"]
    grammars = {}
    if emit in ("cf", "all"):
        grammars.update(G=art.G, H=art.H)
    if emit in ("equiv", "all"):
        grammars.update(G_e=art.G_e, H_e=art.H_e)
    if emit in ("regular", "all"):
        if art.j is None or art.c < 2:
            raise GrammarError(f"the regular pair needs c to be a power of two >= 2, got {art.c}")
        grammars.update(G_r=art.G_r, H_r=art.H_r)
    out = Path(o["out"])
    files = {}
    for name, g in grammars.items():
        text = dump_grammar(g)
        _atomic_write(out / f"{name}.gram", text)
        files[name] = {"path": f"{name}.gram", "sha256": hashlib.sha256(text.encode()).hexdigest()}
    manifest = art.manifest(include_regular=emit in ("regular", "all"))
    manifest["files"] = files
    manifest["version"] = __version__
    _atomic_write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    res = {"out": str(out), "c": str(art.c), "certified": art.certified, "files": files}
    return EXIT_HOLDS, res, f"wrote {', '.join(sorted(files))} and manifest.json to {out}"


def cmd_to_pnml(cfg, io, deadline):
    g = io.grammar(cfg.inputs[0])
    net = to_petri_net(g)
    xml = net.to_pnml(net_id=cfg.options["net_id"])
    res = {"places": len(net.places), "transitions": len(net.transitions)}
    if cfg.options["out"]:
        _atomic_write(Path(cfg.options["out"]), xml)
        res["sha256"] = hashlib.sha256(xml.encode()).hexdigest()
        return EXIT_HOLDS, res, f"wrote {cfg.options['out']}"
    return EXIT_HOLDS, res, xml.rstrip("\n")


COMMANDS = {
    "classify": cmd_classify,
    "member": cmd_member,
    "enumerate": cmd_enumerate,
    "inclusion": cmd_inclusion,
    "equivalence": cmd_equivalence,
    "parikh": cmd_parikh,
    "huynh": cmd_huynh,
    "solve-dioph": cmd_solve_dioph,
    "sl-member": cmd_sl_member,
    "sl-incl": cmd_sl_incl,
    "compile-lower-bound": cmd_compile,
    "to-pnml": cmd_to_pnml,
}


# --- parsing and dispatch ---------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 3, not argparse's 2 (which means inconclusive here)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", dest="as_json", action="store_true", help="print the JSON report instead of text")
    common.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("--seed", type=int, default=0, help="seed recorded in the report (default 0)")
    common.add_argument("--budget-ms", type=float, help=f"wall-clock cap; overrides ${ENV_BUDGET_MS}")

    p = _Parser(prog="comgram", description="Commutative grammars, semilinear sets and Pi_2 reductions.")
    p.add_argument("--version", action="version", version=f"comgram {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="VERB", parser_class=_Parser)

    def verb(name, help_, *positionals):
        sp = sub.add_parser(name, help=help_, parents=[common])
        for arg, h in positionals:
            sp.add_argument(arg, help=h)
        return sp

    def bounds(sp, length=100, forms=1_000_000):
        sp.add_argument("--max-length", type=int, default=length, help=f"terminal length cap (default {length})")
        sp.add_argument("--max-forms", type=int, default=forms, help=f"sentential form cap (default {forms})")

    verb("classify", "report the grammar classes", ("grammar", "grammar file"))
    sp = verb("member", "decide word membership", ("grammar", "grammar file"), ("word", "e.g. 'a^2 b'"))
    sp.add_argument("--start", help="start form instead of the axiom")
    sp.add_argument("--max-forms", type=int, default=2_000_000)
    sp = verb("enumerate", "bounded language or reachability enumeration", ("grammar", "grammar file"))
    bounds(sp, length=10)
    sp.add_argument("--max-depth", type=int)
    sp.add_argument("--reach", action="store_true", help="list reachable forms instead of words")
    for name, h in (("inclusion", "decide lan(G) <= lan(H)"), ("equivalence", "decide lan(G) == lan(H)")):
        sp = verb(name, h, ("g", "first grammar"), ("h", "second grammar"))
        sp.add_argument("--method", choices=("brute", "semilinear"), default="brute")
        sp.add_argument("--bits", type=int, default=8, help="witness bit bound for --method semilinear")
        bounds(sp)
    sp = verb("parikh", "Parikh image of a regular grammar", ("grammar", "grammar file"))
    sp.add_argument("--no-verify", action="store_true")
    sp = verb("huynh", "full-rank decomposition of a semilinear set", ("set", "semilinear JSON"))
    sp.add_argument("--no-verify", action="store_true")
    verb("solve-dioph", "minimal solutions of A x >= c", ("system", "JSON with A and c"))
    verb("sl-member", "semilinear membership", ("set", "semilinear JSON"), ("vector", "e.g. 1,2,3"))
    sp = verb("sl-incl", "bit-bounded semilinear inclusion", ("m", "semilinear JSON"), ("n", "semilinear JSON"))
    sp.add_argument("--bits", type=int, default=8)
    sp.add_argument("--no-verify", action="store_true")
    sp = verb("compile-lower-bound", "compile a Pi_2 sentence into grammar instances")
    sp.add_argument("--formula", required=True, help="s-expression sentence file")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--c-override", type=int, help="use this c instead of the certified one")
    sp.add_argument("--emit", choices=("cf", "regular", "equiv", "all"), default="cf")
    sp.add_argument("--binary", action="store_true", help="binary-expand G")
    sp = verb("to-pnml", "export the Petri-net view as PNML", ("grammar", "grammar file"))
    sp.add_argument("--out", help="write to a file instead of stdout")
    sp.add_argument("--net-id", default="net")
    return p


_POSITIONALS = {
    "classify": ("grammar",),
    "member": ("grammar", "word"),
    "enumerate": ("grammar",),
    "inclusion": ("g", "h"),
    "equivalence": ("g", "h"),
    "parikh": ("grammar",),
    "huynh": ("set",),
    "solve-dioph": ("system",),
    "sl-member": ("set", "vector"),
    "sl-incl": ("m", "n"),
    "compile-lower-bound": (),
    "to-pnml": ("grammar",),
}
_GLOBAL = {"command", "as_json", "report", "timings", "seed", "budget_ms"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    pos = _POSITIONALS[ns.command]
    d = vars(ns)
    options = {k: v for k, v in d.items() if k not in _GLOBAL and k not in pos}
    return RunConfig(ns.command, [d[k] for k in pos], options, ns.seed, ns.report, ns.as_json, ns.timings, ns.budget_ms)


def _env_deadline() -> Deadline:
    raw = os.environ.get(ENV_BUDGET_MS)
    try:
        ms = float(raw) if raw else None
    except ValueError:
        ms = -1.0
    if ms is not None and not ms > 0:
        raise ParseError(f"${ENV_BUDGET_MS} must be a positive number of milliseconds, got {raw!r}")
    return Deadline(ms=ms)


def run(cfg: RunConfig) -> tuple[int, dict, str]:
    """Execute one command; returns (exit code, JSON report, human-readable text)."""
    io = _Inputs(cfg)
    t0 = time.perf_counter()
    verdict = None
    try:
        deadline = Deadline(ms=cfg.budget_ms) if cfg.budget_ms else _env_deadline()
        code, result, text = COMMANDS[cfg.command](cfg, io, deadline)
        verdict = {0: "holds", 1: "counterexample", 2: "inconclusive"}[code]
    except _INPUT_ERRORS as exc:
        code, result, text, verdict = EXIT_INPUT, {"error": str(exc), "kind": type(exc).__name__}, f"error: {exc}", "error"
    except BudgetExceeded as exc:
        code, result, text, verdict = EXIT_INCONCLUSIVE, {"error": str(exc), "kind": "BudgetExceeded"}, f"inconclusive: {exc}", "inconclusive"
    except ComgramError as exc:
        code, result, text, verdict = EXIT_INPUT, {"error": str(exc), "kind": type(exc).__name__}, f"error: {exc}", "error"
    report = {
        "tool": "comgram",
        "version": __version__,
        "command": cfg.command,
        "seed": cfg.seed,
        "inputs": [{"path": p, "sha256": cfg.hashes[p]} for p in sorted(cfg.hashes)],
        "options": {k: cfg.options[k] for k in sorted(cfg.options)},
        "arguments": [a for a in cfg.inputs if a not in cfg.hashes],
        "verdict": verdict,
        "exit_code": code,
        "result": result,
    }
    if cfg.timings:
        report["timings"] = {"wall_s": round(time.perf_counter() - t0, 6)}
    return code, report, text


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        parser.error(str(exc))
    code, report, text = run(cfg)
    doc = dumps_report(report)
    if cfg.report:
        _atomic_write(Path(cfg.report), doc)
    out = sys.stderr if code == EXIT_INPUT and not cfg.as_json else sys.stdout
    out.write(doc if cfg.as_json else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
