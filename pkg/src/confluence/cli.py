"""Command-line entry point for headless use of the framework.

Exit codes: 0 success, 1 domain errors (bad names, validation
findings, failed runs), 2 usage errors (bad arguments, missing
files).  Output is plain lines, safe to diff in scripts.
"""

import argparse
import json
import os
import sys

from .components import UnknownComponentError, resolve_component
from .coupler import (
    CompositionError,
    load_composition_file,
    run,
    smoke_test,
    validate_composition,
)
from .registry import MetadataError, format_citation, list_components
from .standard_names import NameParseError, canonical_form, parse


def _cmd_names(args):
    status = 0
    for text in args.names:
        try:
            print("OK {}".format(canonical_form(parse(text))))
        except NameParseError as err:
            print("ERR {}@{}".format(err.kind, err.position))
            status = 1
    return status


def _cmd_components(args):
    for meta in list_components():
        print(meta.class_name)
    return 0


def _load_for(args):
    if not os.path.exists(args.composition):
        print("no such composition file: {}".format(args.composition), file=sys.stderr)
        return None, 2
    try:
        comp = load_composition_file(args.composition)
    except (CompositionError, UnknownComponentError) as err:
        print(str(err))
        return None, 1
    return comp, 0


def _cmd_validate(args):
    comp, status = _load_for(args)
    if comp is None:
        return status
    findings = validate_composition(comp)
    for finding in findings:
        print(str(finding))
    if findings:
        return 1
    print("ok")
    return 0


def _cmd_run(args):
    comp, status = _load_for(args)
    if comp is None:
        return status
    findings = validate_composition(comp)
    if findings:
        for finding in findings:
            print(str(finding))
        return 1
    summary = run(comp, args.workdir)
    if summary.status == "succeeded":
        print("succeeded t_final={}".format(repr(summary.t_final)))
        return 0
    print("failed {}".format(summary.error))
    return 1


def _cmd_smoke(args):
    if args.all:
        classes = [meta.class_name for meta in list_components()]
    else:
        classes = [args.component]
    status = 0
    for class_name in classes:
        try:
            cls = resolve_component(class_name)
        except UnknownComponentError as err:
            print(str(err), file=sys.stderr)
            return 2
        report = smoke_test(cls)
        for check in report.checks:
            line = "{} {} {}".format(
                report.component, check.name, "PASS" if check.passed else "FAIL"
            )
            if not check.passed and check.message:
                line += " ({})".format(check.message)
            print(line)
        if not report.passed:
            status = 1
    return status


def _cmd_citation(args):
    if not os.path.exists(args.metadata):
        print("no such metadata file: {}".format(args.metadata), file=sys.stderr)
        return 2
    try:
        with open(args.metadata) as stream:
            doc = json.load(stream)
        print(format_citation(doc))
    except (ValueError, MetadataError) as err:
        print(str(err))
        return 1
    return 0


def _cmd_serve(args):
    from . import server

    server.serve(
        host=args.host,
        port=args.port,
        root=args.root,
        workers=args.workers,
        ui=args.ui,
    )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="confluence",
        description="compose, validate, run, and serve coupled models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("names", help="check standard names")
    p.add_argument("names", nargs="+", help="names to parse")
    p.set_defaults(func=_cmd_names)

    p = sub.add_parser("components", help="list registered component classes")
    p.set_defaults(func=_cmd_components)

    p = sub.add_parser("validate", help="check a composition document")
    p.add_argument("composition", help="path to a composition file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("run", help="run a composition")
    p.add_argument("composition", help="path to a composition file")
    p.add_argument("--workdir", default=".", help="where outputs are written")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("smoke", help="smoke-test components")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("component", nargs="?", help="component class to test")
    group.add_argument("--all", action="store_true", help="test every registered class")
    p.set_defaults(func=_cmd_smoke)

    p = sub.add_parser("citation", help="format a citation from metadata")
    p.add_argument("metadata", help="path to a metadata file")
    p.set_defaults(func=_cmd_citation)

    p = sub.add_parser("serve", help="start the HTTP server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--root", default=None, help="store directory")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--ui", default=None, help="directory of browser-client files")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
