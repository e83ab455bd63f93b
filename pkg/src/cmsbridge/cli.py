"""Command line: discover, generate, diagram and mock.

Exit codes: 0 success, 1 usage error, 2 the operation itself failed.
Secrets are only ever taken from the environment variable named by
``--secret-env`` so they never show up in argv or shell history.
"""

import argparse
import logging
import os
import signal
import sys
import tempfile

from . import __version__
from .codegen import generate, write_plan
from .discovery import discover
from .errors import CmsBridgeError
from .http import NO_CREDENTIALS, SiteCredentials
from .metamodel import Platform
from .mock import load_definition
from .mock.server import MockCms
from .modelio import emit_diagram, load_model, save_model

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

log = logging.getLogger("cmsbridge")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        if message.startswith("unrecognized arguments:"):
            # only name the flags: a stray value might be a secret typed on the command line
            flags = [a.split("=", 1)[0] for a in message.split(":", 1)[1].split()
                     if a.startswith("-")]
            message = "unrecognized arguments" + (f": {' '.join(flags)}" if flags else "")
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fail(message):
    print(f"error: {message}", file=sys.stderr)
    return EXIT_FAILED


def _write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file so a failure leaves nothing behind."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cmsbridge-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_model(path):
    with open(path, encoding="utf-8") as fh:
        return load_model(fh.read())


def _credentials(args):
    if args.secret_env and not args.user:
        raise UsageError("--secret-env needs --user")
    if not args.user:
        return NO_CREDENTIALS
    if not args.secret_env:
        raise UsageError("--user needs --secret-env naming the variable that holds the secret")
    secret = os.environ.get(args.secret_env)
    if secret is None:
        raise UsageError(f"environment variable {args.secret_env} is not set")
    return SiteCredentials.basic(args.user, secret)


def cmd_discover(args):
    credentials = _credentials(args)
    try:
        report = discover(args.url, credentials, Platform.parse(args.platform))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for w in report.warnings:
        print(f"warning: {w.code}: {w.message}", file=sys.stderr)
    text = save_model(report.model)
    if args.out:
        _write_atomic(args.out, text)
        log.info("wrote %s (%d extension classes)", args.out, len(report.model.extensions))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_generate(args):
    model = _read_model(args.model)
    plan = generate(model, args.site_name, scenario=args.scenario)
    written = write_plan(plan, args.out)
    for r in plan.renames:
        print(f"warning: renamed {r[0]} {r[1]!r} to {r[2]!r}", file=sys.stderr)
    log.info("wrote %d files to %s", len(written), args.out)
    return EXIT_OK


def cmd_diagram(args):
    text = emit_diagram(_read_model(args.model))
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_mock(args):
    definition = load_definition(args.site)
    site = MockCms(definition, host=args.host, port=args.port, log_requests=True)

    def stop(signum, frame):
        raise KeyboardInterrupt

    signal.signal(signal.SIGTERM, stop)
    signal.signal(signal.SIGINT, stop)
    print(f"serving {definition.site_name or 'mock site'} ({definition.platform.value}) "
          f"at {site.url}", file=sys.stderr, flush=True)
    try:
        site.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        site.httpd.server_close()
    print("stopped", file=sys.stderr)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="cmsbridge",
                     description="Reverse-engineer a headless CMS and generate client code.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("discover", help="extract the model of a running CMS")
    p.add_argument("--url", required=True, help="site root, e.g. http://localhost:8080")
    p.add_argument("--platform", required=True, type=str.lower,
                   choices=["drupal", "wordpress"])
    p.add_argument("--user", help="user name for Basic authentication")
    p.add_argument("--secret-env", metavar="VAR",
                   help="name of the environment variable holding the secret")
    p.add_argument("--out", help="output model file (default: stdout)")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("generate", help="generate client middleware from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--site-name", help="identifier used for the SiteManager (default: from model)")
    p.add_argument("--scenario", action="store_true",
                   help="also emit scenario.py, the integration example")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("diagram", help="render a model as a PlantUML class diagram")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="output .puml file (default: stdout)")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("mock", help="serve a mock site definition until interrupted")
    p.add_argument("--site", required=True, help="mocksite/1 definition file")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_mock)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose or args.command == "mock"
                        else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cmsbridge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CmsBridgeError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
