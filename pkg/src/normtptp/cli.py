"""Command-line front end: ``normtptp <subcommand> ...``."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .check import check_problem, describe_model
from .embed import GLOBAL, LOCAL, embed
from .errors import ToolchainError
from .lrml import lrml_to_nmf
from .nmf import TargetLogic
from .parser import parse_problem
from .printer import print_problem
from .semantics import DEFAULT_BUDGET, DEFAULT_MAX_WORLDS
from .translate import specialize

BUDGET_ENV = "NORMTPTP_ENUM_BUDGET"
STDOUT = "-"


@dataclass(frozen=True)
class PipelineConfig:
    target: Optional[TargetLogic] = None
    mode: str = GLOBAL
    max_worlds: int = DEFAULT_MAX_WORLDS
    simplify: bool = True
    output: Optional[str] = None

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ToolchainError("--max-worlds must be at least 1")
        if self.mode not in (GLOBAL, LOCAL):
            raise ToolchainError(f"unknown semantics {self.mode!r}")


def _strip(name: str, suffixes) -> str:
    for s in suffixes:
        if name.endswith(s) and len(name) > len(s):
            return name[: -len(s)]
    return name


def nmf_path(src: str) -> str:
    return _strip(src, (".xml",)) + ".nmf.p"


def logic_path(src: str, target: TargetLogic) -> str:
    suffix = ".sdl.p" if target == TargetLogic.SDL else ".ddl.p"
    return _strip(src, (".nmf.p", ".p")) + suffix


def thf_path(src: str) -> str:
    return _strip(src, (".p",)) + ".thf.p"


def problem_name(path: str) -> str:
    return _strip(Path(path).name, (".p",))


def _read(path: str) -> str:
    if path == STDOUT:
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ToolchainError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    if path == STDOUT:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ToolchainError(f"cannot write {path}: {exc.strerror}") from None


def _budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ToolchainError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ToolchainError(f"{BUDGET_ENV} must be positive")
    return value


def _target(text: Optional[str]) -> Optional[TargetLogic]:
    return TargetLogic.parse(text) if text else None


# -- stage functions (text in, text out) -------------------------------------


def stage_lrml2nmf(xml: str) -> str:
    return print_problem(lrml_to_nmf(xml))


def stage_nmf2logic(text: str, target: Optional[TargetLogic], simplify: bool = True):
    out = specialize(parse_problem(text), target, simplify)
    spec = out.logic_spec.payload
    resolved = TargetLogic.SDL if spec.logic_name == "$modal" else TargetLogic.parse(spec.options[0].value)
    return print_problem(out), resolved


def stage_embed(text: str, mode: str = GLOBAL) -> str:
    return print_problem(embed(parse_problem(text), mode))


def stage_check(text: str, name: str, mode: str, max_worlds: int, show_model: bool = False) -> str:
    result = check_problem(parse_problem(text), mode, max_worlds, _budget())
    lines = [result.szs_line(name)]
    if show_model:
        lines.extend(describe_model(result.verdict))
    return "\n".join(lines) + "\n"


# -- subcommands --------------------------------------------------------------


def cmd_lrml2nmf(args) -> int:
    _write(args.output or nmf_path(args.input), stage_lrml2nmf(_read(args.input)))
    return 0


def cmd_nmf2logic(args) -> int:
    text, target = stage_nmf2logic(_read(args.input), _target(args.logic), not args.no_simplify)
    _write(args.output or logic_path(args.input, target), text)
    return 0


def cmd_embed(args) -> int:
    cfg = PipelineConfig(mode=args.semantics)
    _write(args.output or thf_path(args.input), stage_embed(_read(args.input), cfg.mode))
    return 0


def cmd_check(args) -> int:
    cfg = PipelineConfig(mode=args.semantics, max_worlds=args.max_worlds)
    sys.stdout.write(stage_check(_read(args.input), problem_name(args.input), cfg.mode, cfg.max_worlds,
                                 args.show_model))
    return 0


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig(_target(args.logic), args.semantics, args.max_worlds, not args.no_simplify,
                         args.output_dir)
    base = args.input
    if cfg.output is not None:
        base = str(Path(cfg.output) / Path(args.input).name)
    nmf_file = nmf_path(base)
    nmf_text = stage_lrml2nmf(_read(args.input))
    _write(nmf_file, nmf_text)
    logic_text, target = stage_nmf2logic(nmf_text, cfg.target, cfg.simplify)
    logic_file = logic_path(nmf_file, target)
    _write(logic_file, logic_text)
    if target == TargetLogic.CARMO_JONES:
        print(f"normtptp: note: no embedding for {target.value}; THF stage skipped", file=sys.stderr)
    else:
        _write(thf_path(logic_file), stage_embed(logic_text, cfg.mode))
    if args.check:
        sys.stdout.write(stage_check(logic_text, problem_name(logic_file), cfg.mode, cfg.max_worlds,
                                     args.show_model))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normtptp", description="LegalRuleML to TPTP normative reasoning toolchain")
    sub = parser.add_subparsers(dest="command", required=True)
    logics = [t.value for t in TargetLogic]

    p = sub.add_parser("lrml2nmf", help="translate LegalRuleML XML into NMF")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="output file, '-' for stdout")
    p.set_defaults(func=cmd_lrml2nmf)

    p = sub.add_parser("nmf2logic", help="specialize an NMF problem to a deontic logic")
    p.add_argument("--logic", choices=logics, help="target logic (defaults to the one declared in the input)")
    p.add_argument("--no-simplify", action="store_true", help="keep '$true =>' antecedents")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_nmf2logic)

    p = sub.add_parser("embed", help="embed an SDL or E problem into THF")
    p.add_argument("--semantics", choices=[GLOBAL, LOCAL], default=GLOBAL)
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("check", help="decide a ground SDL or E problem")
    p.add_argument("--semantics", choices=[GLOBAL, LOCAL], default=GLOBAL)
    p.add_argument("--max-worlds", type=int, default=DEFAULT_MAX_WORLDS)
    p.add_argument("--show-model", action="store_true", help="print the witness model as comments")
    p.add_argument("input")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("pipeline", help="run every stage on a LegalRuleML file")
    p.add_argument("--logic", choices=logics, required=True)
    p.add_argument("--check", action="store_true")
    p.add_argument("--semantics", choices=[GLOBAL, LOCAL], default=GLOBAL)
    p.add_argument("--max-worlds", type=int, default=DEFAULT_MAX_WORLDS)
    p.add_argument("--no-simplify", action="store_true")
    p.add_argument("--show-model", action="store_true")
    p.add_argument("--output-dir", help="directory for the stage outputs (default: next to the input)")
    p.add_argument("input")
    p.set_defaults(func=cmd_pipeline)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args)
    except ToolchainError as exc:
        print(f"normtptp: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"normtptp: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
