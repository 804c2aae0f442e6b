"""
Command-line entry point: generate a warehouse, export its workload,
benchmark a backend, and summarize run reports.

Exit codes: 0 success, 1 parameter error, 2 runtime or driver error,
3 verification mismatch.
"""
import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from xwebbench import __version__
from xwebbench.codec.documents import WarehouseDocuments
from xwebbench.codec.manifest import MANIFEST_NAME, RunManifest, document_digests, verify_manifest, write_manifest
from xwebbench.codec.parse import parse_model
from xwebbench.datagen.build import write_warehouse
from xwebbench.datagen.params import GenParams
from xwebbench.datagen.sizing import (
    DEFAULT_FACT_SIZE,
    DEFAULT_NODESIZE,
    estimate_size,
    expected_cardinalities,
    measure_nodesizes,
)
from xwebbench.datagen.taxonomy import build_category_taxonomy
from xwebbench.drivers.base import Driver
from xwebbench.drivers.http import HttpDriver, HttpDriverConfig
from xwebbench.drivers.reference import ReferenceDriver
from xwebbench.errors import ParameterError, TaxonomyError, XWebError
from xwebbench.graph import app as benchmark_graph
from xwebbench.harness.report import load_reports, plot_series, summarize_reports, write_report_csv, write_report_json
from xwebbench.model import MODEL_DOCUMENT, WarehouseModel, build_default_model
from xwebbench.utils.settings import Settings, configure_logging, load_environment, parse_bool
from xwebbench.workload.queries import WorkloadConfig
from xwebbench.workload.xquery import export_workload

logger = logging.getLogger("xwebbench")

EXIT_OK = 0
EXIT_PARAMETER = 1
EXIT_RUNTIME = 2
EXIT_MISMATCH = 3

ALL_BLOCKS = "RE,1D,2D,3D,CH"


class RunSettings(BaseModel):
    """Resolved settings of the run subcommand."""
    model_config = ConfigDict(frozen=True)

    warehouse: Path
    driver: Literal["reference", "http"] = "reference"
    driver_config: Optional[Path] = None
    workload: WorkloadConfig = WorkloadConfig()
    verify: bool = False
    report_dir: Path = Path("reports")

    @classmethod
    def create(cls, **values) -> "RunSettings":
        try:
            return cls(**values)
        except ValidationError as e:
            raise ParameterError("; ".join(f"{'.'.join(map(str, i['loc']))}: {i['msg']}" for i in e.errors())) from e


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAMETER, f"{self.prog}: error: {message}\n")


def _warehouse_dir(settings: Settings, flag: Optional[str]) -> Path:
    directory = Path(settings.get("warehouse", flag, "warehouse"))
    if not (directory / MODEL_DOCUMENT).is_file():
        raise ParameterError(f"{directory} is not a generated warehouse (no {MODEL_DOCUMENT})")
    return directory


def _gen_params(args: argparse.Namespace, settings: Settings) -> GenParams:
    values = {
        "sf": settings.get("sf", args.sf, None, float),
        "density": settings.get("density", args.density, None, float),
        "scale_divisor": settings.get("divisor", args.divisor, None, int),
        "seed": settings.get("seed", getattr(args, "seed", None), None, int),
        "p_missing": settings.get("pm", getattr(args, "pm", None), None, float),
        "p_reorder": settings.get("po", getattr(args, "po", None), None, float),
    }
    return GenParams.create(**{k: v for k, v in values.items() if v is not None})


def _workload(args: argparse.Namespace, settings: Settings) -> WorkloadConfig:
    blocks = settings.get("blocks", args.blocks, ALL_BLOCKS)
    values = {
        "nrun": settings.get("nrun", getattr(args, "nrun", None), None, int),
        "timeout": settings.get("timeout", getattr(args, "timeout", None), None, float),
    }
    return WorkloadConfig.from_blocks(blocks, **{k: v for k, v in values.items() if v is not None})


def cmd_generate(args: argparse.Namespace, settings: Settings) -> int:
    gp = _gen_params(args, settings)
    out = Path(settings.get("out", args.out, "warehouse"))
    taxonomy_file = settings.get("taxonomy", args.taxonomy)
    partitions = settings.get("partitions", args.partitions, 1, int)
    tax = build_category_taxonomy(taxonomy_file)

    generated = write_warehouse(gp, out, tax, partitions)
    manifest = RunManifest(
        params=gp.echo(),
        taxonomy=str(taxonomy_file) if taxonomy_file else "built-in",
        partitions=partitions,
        fact_count=generated.fact_count,
        counts=generated.dimension_counts,
        digests=document_digests(out),
    )
    write_manifest(manifest, out)
    print(f"wrote {generated.fact_count} facts and {len(manifest.digests)} documents to {out}")
    return EXIT_OK


def _open_driver(run: RunSettings) -> Driver:
    if run.driver == "reference":
        return ReferenceDriver()
    if run.driver_config is None:
        raise ParameterError("--driver http needs --driver-config")
    return HttpDriver(HttpDriverConfig.from_file(run.driver_config))


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    run = RunSettings.create(
        warehouse=_warehouse_dir(settings, args.warehouse),
        driver=settings.get("driver", args.driver, "reference"),
        driver_config=settings.get("driver_config", args.driver_config),
        workload=_workload(args, settings),
        verify=settings.get("verify", args.verify, False, parse_bool),
        report_dir=settings.get("report_dir", args.report_dir, "reports"),
    )
    docs = WarehouseDocuments.from_directory(run.warehouse)
    model = parse_model(docs.model_doc)
    manifest_path = run.warehouse / MANIFEST_NAME
    manifest = RunManifest.from_file(manifest_path) if manifest_path.is_file() else None

    with _open_driver(run) as driver:
        state = benchmark_graph.invoke({
            "driver": driver,
            "documents": docs,
            "workload_config": run.workload,
            "model": model,
            "verify": run.verify,
            "environment": {
                "warehouse": str(run.warehouse),
                "generation": manifest.params if manifest else {},
                "toolkit_version": __version__,
            },
            "fact_count": manifest.fact_count if manifest else None,
        })
    report = state["run_report"]

    stamp = datetime.now().strftime("%Y%m%dT%H%M%S")
    json_path = write_report_json(report, run.report_dir / f"run-{report.driver}-{stamp}.json")
    write_report_csv(report, json_path.with_suffix(".csv"))
    print(summarize_reports([(json_path, report)]))

    failed = [q.query_id for q in report.queries if q.status != "ok"]
    if failed:
        logger.warning("queries not completed: %s", ", ".join(failed))
    mismatches = [v for v in report.verdicts.values() if v.status == "mismatch"]
    if mismatches:
        for verdict in mismatches:
            print(f"MISMATCH {verdict.detail}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_report(args: argparse.Namespace, settings: Settings) -> int:
    paths = args.reports or [settings.get("report_dir", None, "reports")]
    reports = load_reports(paths)
    print(summarize_reports(reports))
    if args.plot:
        series = plot_series(reports)
        if args.plot == "-":
            sys.stdout.write(series)
        else:
            Path(args.plot).write_text(series, encoding="utf-8")
            print(f"plot series written to {args.plot}")
    return EXIT_OK


def _model_for(args: argparse.Namespace, settings: Settings) -> WarehouseModel:
    if args.warehouse or settings.get("warehouse"):
        return parse_model(_warehouse_dir(settings, args.warehouse) / MODEL_DOCUMENT)
    return build_default_model()


def cmd_export_queries(args: argparse.Namespace, settings: Settings) -> int:
    wc = _workload(args, settings)
    out = Path(args.out)
    written = export_workload(out, wc, _model_for(args, settings))
    print(f"wrote {len(written)} queries to {out}")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace, settings: Settings) -> int:
    gp = _gen_params(args, settings)
    cardinalities = expected_cardinalities(gp)
    if args.warehouse:
        directory = _warehouse_dir(settings, args.warehouse)
        nodesizes, fact_size = measure_nodesizes(
            WarehouseDocuments.from_directory(directory), parse_model(directory / MODEL_DOCUMENT)
        )
    else:
        nodesizes = {d: args.nodesize for d in cardinalities}
        fact_size = args.fact_size
    print(estimate_size(gp, cardinalities, nodesizes, fact_size).model_dump_json(indent=2))
    return EXIT_OK


def cmd_check(args: argparse.Namespace, settings: Settings) -> int:
    directory = _warehouse_dir(settings, args.warehouse)
    tampered = verify_manifest(directory)
    if tampered:
        print("tampered or missing: " + ", ".join(tampered), file=sys.stderr)
        return EXIT_MISMATCH
    print(f"{directory}: all documents match {MANIFEST_NAME}")
    return EXIT_OK


def _add_gen_flags(parser: argparse.ArgumentParser, full: bool = True) -> None:
    parser.add_argument("--sf", type=float, help="scale factor (default 1)")
    parser.add_argument("--density", type=float, help="fact retention probability, 0 < D <= 1")
    parser.add_argument("--divisor", type=int, help="cardinality divisor for desk-scale runs (default 1000)")
    if full:
        parser.add_argument("--pm", type=float, help="probability of a missing fact slot")
        parser.add_argument("--po", type=float, help="probability of reordered fact slots")
        parser.add_argument("--seed", type=int, help="generation seed (default 42)")


def _add_workload_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--blocks", help=f"enabled blocks (default {ALL_BLOCKS})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xwebbench", description="XML data warehouse benchmark toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="KEY=value file with defaults for any flag")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-q", "--quiet", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("generate", help="generate the warehouse documents")
    _add_gen_flags(p)
    p.add_argument("--out", help="output directory (default ./warehouse)")
    p.add_argument("--taxonomy", help="category taxonomy file, one 'CHILD -> PARENT' per line")
    p.add_argument("--partitions", type=int, help="generate facts in this many customer partitions")
    p.set_defaults(handler=cmd_generate)

    p = commands.add_parser("run", help="load a warehouse into a backend and time the workload")
    p.add_argument("--warehouse", help="generated warehouse directory")
    p.add_argument("--driver", choices=("reference", "http"))
    p.add_argument("--driver-config", dest="driver_config", help="HTTP driver config file")
    _add_workload_flags(p)
    p.add_argument("--nrun", type=int, help="warm runs per query (default 3)")
    p.add_argument("--timeout", type=float, help="per-query timeout in seconds (default 60)")
    p.add_argument("--verify", action="store_true", default=None, help="check answers against the reference evaluator")
    p.add_argument("--report-dir", dest="report_dir", type=Path, help="where reports go (default ./reports)")
    p.set_defaults(handler=cmd_run)

    p = commands.add_parser("report", help="summarize run reports")
    p.add_argument("reports", nargs="*", help="report files or directories")
    p.add_argument("--plot", help="write response time vs fact count series as CSV ('-' for stdout)")
    p.set_defaults(handler=cmd_report)

    p = commands.add_parser("export-queries", help="write the workload as XQuery files")
    p.add_argument("--out", default="queries")
    p.add_argument("--warehouse", help="take the model from this warehouse instead of the built-in one")
    _add_workload_flags(p)
    p.set_defaults(handler=cmd_export_queries)

    p = commands.add_parser("estimate", help="estimate the warehouse size before generating it")
    _add_gen_flags(p, full=False)
    p.add_argument("--warehouse", help="measure node sizes from this generated warehouse")
    p.add_argument("--nodesize", type=float, default=float(DEFAULT_NODESIZE))
    p.add_argument("--fact-size", dest="fact_size", type=float, default=float(DEFAULT_FACT_SIZE))
    p.set_defaults(handler=cmd_estimate)

    p = commands.add_parser("check", help="verify warehouse documents against their manifest")
    p.add_argument("--warehouse", help="generated warehouse directory")
    p.set_defaults(handler=cmd_check)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_environment()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose - args.quiet)
    try:
        settings = Settings(args.config)
        return args.handler(args, settings)
    except (ParameterError, TaxonomyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARAMETER
    except (XWebError, OSError) as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
