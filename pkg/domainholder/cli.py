"""The ``domainholder`` command.

Machine-readable output (result records, ``--json`` summaries) goes to stdout; logging and diagnostics go to stderr.

Exit codes:

* ``0``: success (for ``resolve`` and ``techniques``, an organization was attributed)
* ``1``: the domain is unidentified, or ``fixtures verify`` found problems
* ``2``: usage error, or an input file or configuration that can't be used

"""


import argparse
from concurrent.futures import ThreadPoolExecutor
import json
import logging
import sys

from rich.console import Console
from rich.markup import escape
from rich.table import Table

from . import __version__, constants
from .audit.disclosure import load_relations
from .audit.flows import ingest_flows
from .audit.report import build_report, load_policies, render_report, write_report
from .certinfo.certificate import classify_validation, org_from_certificate
from .config import Config
from .constants import FixtureMode
from .evalbench.bench import (
    compare_techniques,
    evaluate_technique,
    failure_breakdown,
    render_breakdown,
    render_evaluations,
    write_summary,
)
from .evalbench.metrics import to_percent
from .exceptions import ArchiveCorrupt, DomainHolderError, InvalidDomain
from .fetch_manager.fixture_store import FixtureStore
from .policy.classifier import accuracy, load_corpus, split_corpus, train_classifier
from .resolver.records import read_results, result_to_record, write_results

_LOGGER = logging.getLogger(__name__)

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


# ======================================================================= #
#                                                                         #
#                                 Helpers                                 #
#                                                                         #
# ======================================================================= #
def _positive_int(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("'{}' is not an integer".format(value))
    if number < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return number


def read_domains(path):
    """Read one domain per line, skipping blank lines and ``#`` comments."""
    with open(path, encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip() and not line.lstrip().startswith("#")]


def load_config(args):
    """Load the configuration and apply the fixture-mode flags."""
    config = Config.load(args.config)
    if args.replay:
        return config.with_fixture_mode(FixtureMode.REPLAY, args.replay)
    if args.record:
        return config.with_fixture_mode(FixtureMode.RECORD, args.record)
    if args.live:
        return config.with_fixture_mode(FixtureMode.LIVE)
    return config


def _print_json(data):
    print(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False))


def _note_to_dict(note):
    if note is None:
        return None
    return {
        "organization": org_from_certificate(note),
        "validation": classify_validation(note).value,
        "issuer": note.issuer_name,
    }


def _stdout():
    return Console(soft_wrap=True)


def _stderr():
    return Console(stderr=True, soft_wrap=True)


# ======================================================================= #
#                                                                         #
#                                Commands                                 #
#                                                                         #
# ======================================================================= #
def cmd_resolve(args):
    """Resolve one domain."""
    resolver = load_config(args).build_resolver(compare_certificates=args.certificates)
    result = resolver.resolve(args.domain)

    if args.json:
        record = result_to_record(result)
        if args.certificates:
            record["certificate"] = _note_to_dict(result.certificate_note)
        print(json.dumps(record, sort_keys=True, ensure_ascii=False))
    else:
        console = _stdout()
        if result.identified:
            console.print(
                "{}: [bold]{}[/bold] ({})".format(escape(result.input_fqdn), escape(result.organization), result.method.value)
            )
            console.print("  evidence: {}".format(result.evidence), markup=False)
        else:
            console.print("{}: [bold]Unidentified[/bold]".format(escape(result.input_fqdn)))
        if result.flags:
            console.print("  flags: {}".format(", ".join(result.flags)), markup=False)
        if args.certificates:
            note = _note_to_dict(result.certificate_note)
            if note is None:
                console.print("  certificate: unavailable")
            else:
                console.print(
                    "  certificate: {} ({}, issued by {})".format(
                        note["organization"] or "no organization", note["validation"], note["issuer"]
                    ),
                    markup=False,
                )

    return constants.EXIT_OK if result.identified else constants.EXIT_UNIDENTIFIED


def cmd_batch(args):
    """Resolve every domain in a file and write one record per line."""
    domains = read_domains(args.domains)
    resolver = load_config(args).build_resolver()
    results = resolver.resolve_batch(domains, args.parallelism)

    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            write_results(results, f)
    else:
        write_results(results, sys.stdout)

    identified = sum(result.identified for result in results)
    _LOGGER.info("Attributed %d of %d domains", identified, len(results))
    if args.breakdown:
        render_breakdown(failure_breakdown(results), _stderr())
    return constants.EXIT_OK


def cmd_techniques(args):
    """Run each technique on one domain and show the outcomes side by side."""
    resolver = load_config(args).build_resolver()
    outcomes = resolver.run_techniques(args.domain)

    if args.json:
        _print_json(
            [
                {"technique": outcome.technique, "organization": outcome.organization, "detail": outcome.detail}
                for outcome in outcomes
            ]
        )
    else:
        table = Table(title=args.domain, header_style="bold")
        table.add_column("Technique")
        table.add_column("Organization")
        table.add_column("Detail")
        for outcome in outcomes:
            table.add_row(outcome.technique, outcome.organization or "-", outcome.detail or "")
        _stdout().print(table)

    combined = outcomes[-1]
    return constants.EXIT_OK if combined.organization is not None else constants.EXIT_UNIDENTIFIED


def cmd_eval(args):
    """Score one results file against a ground truth."""
    designators = Config.load(args.config).build_designators()
    evaluation = evaluate_technique(args.results, args.truth, args.technique, designators)
    if args.summary:
        write_summary([evaluation], args.summary)

    if args.json:
        _print_json(evaluation.to_dict())
    else:
        render_evaluations([evaluation], _stdout())

    if args.breakdown:
        render_breakdown(failure_breakdown(read_results(args.results)), _stderr())
    return constants.EXIT_OK


def cmd_compare(args):
    """Score several results files against one ground truth."""
    paths = {}
    for item in args.results:
        name, sep, path = item.partition("=")
        if not sep:
            name, path = item, item
        if name in paths:
            raise ValueError("Technique '{}' is given twice".format(name))
        paths[name] = path

    evaluations = compare_techniques(paths, args.truth, Config.load(args.config).build_designators())
    if args.summary:
        write_summary(evaluations, args.summary)

    if args.json:
        _print_json([evaluation.to_dict() for evaluation in evaluations])
    else:
        render_evaluations(evaluations, _stdout())
    return constants.EXIT_OK


def cmd_train(args):
    """Train the policy classifier and report its training and held-out accuracy."""
    config = Config.load(args.config)
    corpus = load_corpus(args.corpus or config.corpus_dir or constants.CORPUS_DIR)

    if args.holdout:
        train, holdout = split_corpus(corpus, args.holdout, args.seed)
    else:
        train, holdout = corpus, []

    model = train_classifier(train)
    summary = {
        "documents": len(corpus),
        "train_documents": len(train),
        "train_accuracy": str(to_percent(accuracy(model, train))),
        "holdout_documents": len(holdout),
        "holdout_accuracy": str(to_percent(accuracy(model, holdout))) if holdout else None,
        "model": args.output,
    }
    model.save(args.output)

    if args.json:
        _print_json(summary)
    else:
        console = _stdout()
        console.print("Trained on {} of {} documents".format(len(train), len(corpus)))
        console.print("Training accuracy: {}%".format(summary["train_accuracy"]))
        if holdout:
            console.print("Held-out accuracy: {}% ({} documents)".format(summary["holdout_accuracy"], len(holdout)))
        console.print("Model written to {}".format(args.output), markup=False)
    return constants.EXIT_OK


def cmd_audit(args):
    """Audit the third-party disclosures of the apps in a flow log."""
    config = load_config(args)
    flows = ingest_flows(args.flows, strict=args.strict)
    relations = load_relations(args.relations) if args.relations else []
    policies = load_policies(args.policies)

    if args.results:
        resolutions = {result.input_fqdn: result for result in read_results(args.results)}
    else:
        destinations = sorted({flow.destination.text for flow in flows})
        resolver = config.build_resolver()
        resolutions = {
            result.input_fqdn: result for result in resolver.resolve_batch(destinations, args.parallelism)
        }

    report = build_report(
        flows, resolutions, policies, relations, config.build_designators(), config.build_entity_rules()
    )
    if args.report:
        write_report(report, args.report)

    if args.json:
        _print_json(report.to_dict())
    else:
        render_report(report, _stdout())
    return constants.EXIT_OK


def cmd_fixtures_record(args):
    """Record every transaction needed to resolve the listed domains, and to compare techniques on them."""
    domains = read_domains(args.domains)
    config = Config.load(args.config).with_fixture_mode(FixtureMode.RECORD, args.archive)
    resolver = config.build_resolver()

    def record(domain):
        try:
            return resolver.run_techniques(domain)
        except InvalidDomain as exc:
            _LOGGER.warning("Skipping '%s': %s", domain, exc)
            return None

    with ThreadPoolExecutor(max_workers=args.parallelism) as executor:
        list(executor.map(record, domains))

    entries = resolver.store.entries
    _stderr().print("Recorded {} transactions in {}".format(len(entries), args.archive), markup=False)
    return constants.EXIT_OK


def cmd_fixtures_verify(args):
    """Check an archive's files against its index."""
    try:
        problems = FixtureStore(FixtureMode.REPLAY, args.archive).verify()
    except ArchiveCorrupt as exc:
        problems = [str(exc)]

    console = _stderr()
    for problem in problems:
        console.print(problem, markup=False)

    if problems:
        console.print("{} problem(s) in {}".format(len(problems), args.archive), markup=False)
        return constants.EXIT_ARCHIVE_PROBLEMS

    if args.json:
        _print_json({"archive": args.archive, "problems": []})
    return constants.EXIT_OK


# ======================================================================= #
#                                                                         #
#                                 Parser                                  #
#                                                                         #
# ======================================================================= #
def build_parser():
    """Build the argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="configuration file with a [domainholder] section")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--replay", metavar="DIR", help="answer every transaction from this fixture archive")
    mode.add_argument("--record", metavar="DIR", help="perform live transactions and archive them in this directory")
    mode.add_argument("--live", action="store_true", help="use the network, ignoring any configured fixture mode")
    common.add_argument(
        "--parallelism", type=_positive_int, default=1, metavar="N", help="resolve up to N domains at a time"
    )
    common.add_argument("--json", action="store_true", help="print machine-readable JSON to stdout")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging")

    parser = argparse.ArgumentParser(
        prog="domainholder", description="Attribute domains to the organizations holding them."
    )
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    resolve = commands.add_parser("resolve", parents=[common], help="attribute one domain")
    resolve.add_argument("domain")
    resolve.add_argument("--certificates", action="store_true", help="also show the domain's TLS certificate")
    resolve.set_defaults(func=cmd_resolve)

    batch = commands.add_parser("batch", parents=[common], help="attribute every domain in a file")
    batch.add_argument("domains", help="file with one domain per line")
    batch.add_argument("-o", "--output", metavar="FILE", help="write the records here instead of stdout")
    batch.add_argument("--breakdown", action="store_true", help="show unidentified results by cause on stderr")
    batch.set_defaults(func=cmd_batch)

    techniques = commands.add_parser("techniques", parents=[common], help="compare the techniques on one domain")
    techniques.add_argument("domain")
    techniques.set_defaults(func=cmd_techniques)

    evaluate = commands.add_parser("eval", parents=[common], help="score a results file against a ground truth")
    evaluate.add_argument("results", help="file of result records")
    evaluate.add_argument("truth", help="domain<TAB>expected organization file")
    evaluate.add_argument("--technique", help="name shown for the results")
    evaluate.add_argument("--summary", metavar="FILE", help="also write the evaluation as JSON")
    evaluate.add_argument("--breakdown", action="store_true", help="show unidentified results by cause on stderr")
    evaluate.set_defaults(func=cmd_eval)

    compare = commands.add_parser("compare", parents=[common], help="score several results files side by side")
    compare.add_argument("truth", help="domain<TAB>expected organization file")
    compare.add_argument("results", nargs="+", metavar="NAME=FILE", help="results file, optionally named")
    compare.add_argument("--summary", metavar="FILE", help="also write the evaluations as JSON")
    compare.set_defaults(func=cmd_compare)

    train = commands.add_parser("train", parents=[common], help="train the policy classifier")
    train.add_argument("-o", "--output", required=True, metavar="FILE", help="where to write the model")
    train.add_argument("--corpus", metavar="DIR", help="corpus directory with a labels.tsv manifest")
    train.add_argument(
        "--holdout",
        type=int,
        default=constants.DEFAULT_HOLDOUT_SIZE,
        metavar="N",
        help="documents held out for evaluation (0 to train on all of them)",
    )
    train.add_argument("--seed", type=int, default=constants.DEFAULT_SEED, help="seed for the held-out split")
    train.set_defaults(func=cmd_train)

    audit = commands.add_parser("audit", parents=[common], help="audit third-party disclosures in app policies")
    audit.add_argument("flows", help="app<TAB>destination<TAB>transport<TAB>data types file")
    audit.add_argument("--policies", required=True, metavar="DIR", help="directory of <app_id>.html/.txt policies")
    audit.add_argument("--relations", metavar="FILE", help="child<TAB>parent company file")
    audit.add_argument("--results", metavar="FILE", help="use these result records instead of resolving")
    audit.add_argument("--report", metavar="FILE", help="also write the report as JSON")
    audit.add_argument("--strict", action="store_true", help="fail on the first malformed flow line")
    audit.set_defaults(func=cmd_audit)

    fixtures = commands.add_parser("fixtures", help="manage fixture archives")
    fixture_commands = fixtures.add_subparsers(dest="fixtures_command", metavar="ACTION")
    fixture_commands.required = True

    record = fixture_commands.add_parser("record", parents=[common], help="record the transactions for a domain list")
    record.add_argument("domains", help="file with one domain per line")
    record.add_argument("archive", help="archive directory")
    record.set_defaults(func=cmd_fixtures_record)

    verify = fixture_commands.add_parser("verify", parents=[common], help="check an archive's integrity")
    verify.add_argument("archive", help="archive directory")
    verify.set_defaults(func=cmd_fixtures_verify)

    return parser


def main(argv=None):
    """Run the command line interface.

    Parameters
    ----------
    argv : list[str], None
        The arguments; defaults to ``sys.argv[1:]``

    Returns
    -------
    int
        The exit code

    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code

    logging.basicConfig(
        level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)],
        format="%(levelname)s:%(name)s:%(message)s",
        stream=sys.stderr,
    )

    try:
        return args.func(args)
    except (DomainHolderError, OSError, ValueError) as exc:
        _LOGGER.debug("Command '%s' failed", args.command, exc_info=True)
        print("domainholder: error: {}".format(exc), file=sys.stderr)
        return constants.EXIT_USAGE
