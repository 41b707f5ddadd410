import functools
import json
import platform
import yaml
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from .core import config, constructions, export, formats, lie, loops, storage, survey, telemetry
from .core.errors import CenterMismatch, InvalidInput, LimitExceeded, MethodDisagreement, VerificationError
from .core.gf2 import STANDARD_MODULI, BitMatrix, FieldF2m, format_poly, is_irreducible
from .core.i18n import t
from .core.models import CatalogKind, LieReport, ScanMode, Verdict

app = typer.Typer(help="autloop: commutative automorphic loops of exponent 2 from Lie algebras over F2.")
lie_app = typer.Typer(help="Lie algebras over F2 (lief2-v1 files).")
loop_app = typer.Typer(help="Finite loops given by Cayley tables (cayley-v1 files).")
construct_app = typer.Typer(help="Build loops from beta maps, fields and X-families.")
scan_app = typer.Typer(help="Exhaustive and sampled searches over nilpotent brackets.")
app.add_typer(lie_app, name="lie")
app.add_typer(loop_app, name="loop")
app.add_typer(construct_app, name="construct")
app.add_typer(scan_app, name="scan")

console = Console()
err_console = Console(stderr=True)

EXIT_OK, EXIT_FOUND, EXIT_INVALID = 0, 1, 2


def guarded(func):
    """Map the error families onto the exit-code contract."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except VerificationError as e:
            err_console.print(f"[red]{t('errors.verification', name=type(e).__name__, msg=escape(str(e)))}[/red]")
            raise typer.Exit(EXIT_FOUND)
        except LimitExceeded as e:
            err_console.print(f"[red]{t('errors.limit', name=type(e).__name__, msg=escape(str(e)))}[/red]")
            raise typer.Exit(EXIT_INVALID)
        except InvalidInput as e:
            err_console.print(f"[red]{t('errors.invalid', name=type(e).__name__, msg=escape(str(e)))}[/red]")
            raise typer.Exit(EXIT_INVALID)
    return wrapper


def _workspace() -> storage.Workspace:
    ws = storage.get_workspace(Path.cwd())
    config.settings.load_user_config(ws.config_path)
    return ws


def _emit_report(payload, output: Optional[Path], as_json: bool, render=None):
    """Report JSON to -o or stdout; a rich rendering otherwise."""
    text = json.dumps(payload, indent=2) + "\n"
    if output:
        output.write_text(text, encoding="utf-8")
        err_console.print(f"[green]{t('cli.written', path=output)}[/green]")
    elif as_json or render is None:
        typer.echo(text, nl=False)
    else:
        render(payload)


def _emit_artifact(text: str, output: Optional[Path]):
    if output:
        output.write_text(text, encoding="utf-8")
        err_console.print(f"[green]{t('cli.written', path=output)}[/green]")
    else:
        typer.echo(text, nl=False)


def _parse_dims(text: str) -> List[int]:
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise typer.BadParameter(t('cli.scan.bad_dims', value=text))
    if lo < 0 or hi < lo:
        raise typer.BadParameter(t('cli.scan.bad_dims', value=text))
    return list(range(lo, hi + 1))


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return "-"
    return "[green]✓[/green]" if value else "[red]✗[/red]"


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    lang: str = typer.Option(None, "--lang", help="Language (en|ru)")
):
    """Global configuration."""
    if lang:
        config.settings.set_cli_language(lang)

    if ctx.invoked_subcommand is None:
        if lang:
            # Persist lang to .autloop/config.yml in the current directory
            ws = storage.get_workspace(Path.cwd())
            ws.ensure_structure()
            data = {}
            if ws.config_path.exists():
                try:
                    with open(ws.config_path, 'r', encoding="utf-8") as f:
                        data = yaml.safe_load(f) or {}
                except (OSError, yaml.YAMLError):
                    data = {}
            data['lang'] = lang
            with open(ws.config_path, 'w', encoding="utf-8") as f:
                yaml.safe_dump(data, f, allow_unicode=True)
            console.print(f"[green]{t('cli.lang_saved', lang=lang)}[/green]")
            raise typer.Exit(0)
        console.print(ctx.get_help())
        raise typer.Exit(0)


@app.command()
def init(path: Path = typer.Argument(Path("."), help="Where to create the workspace")):
    """Initialize an autloop workspace (.autloop/)."""
    ws = storage.Workspace(path)
    ws.ensure_structure()
    if not ws.config_path.exists():
        with open(ws.config_path, 'w', encoding="utf-8") as f:
            yaml.safe_dump(config.settings.config.model_dump(exclude_none=True), f, allow_unicode=True)
    console.print(f"[green]{t('cli.init.success', path=ws.root)}[/green]")


@app.command()
def doctor():
    """Check libraries and the built-in field moduli."""
    import numpy
    import pandas
    import pydantic

    console.print(Panel(t('cli.doctor.title'), style="bold blue"))
    console.print(t('cli.doctor.python', version=platform.python_version()))
    for name, module in (("numpy", numpy), ("pandas", pandas), ("pydantic", pydantic)):
        console.print(t('cli.doctor.library', name=name, version=getattr(module, "__version__", "?")))

    table = Table(title=t('cli.doctor.moduli_title'))
    table.add_column("m", style="cyan")
    table.add_column(t('cli.doctor.col_modulus'))
    table.add_column(t('cli.doctor.col_irreducible'))
    failures = 0
    for m, poly in sorted(STANDARD_MODULI.items()):
        ok = is_irreducible(poly)
        failures += not ok
        table.add_row(str(m), format_poly(poly), _flag(ok))
    console.print(table)
    if failures:
        console.print(f"[red]{t('cli.doctor.moduli_bad', count=failures)}[/red]")
        raise typer.Exit(EXIT_FOUND)
    console.print(f"[green]{t('cli.doctor.ok')}[/green]")


@app.command()
def status(path: Path = typer.Option(None, help="Workspace path")):
    """Show workspace status and aggregate run metrics."""
    ws = storage.get_workspace(path)
    if not ws.is_valid():
        console.print(t('cli.status.invalid'))
        raise typer.Exit(EXIT_FOUND)

    runs = telemetry.load_runs(ws)
    table = Table(title=t('cli.status.title'))
    table.add_column(t('cli.status.col_metric'), style="cyan")
    table.add_column(t('cli.status.col_value'), style="magenta")
    table.add_row(t('cli.status.total_runs'), str(len(runs)))
    table.add_row(t('cli.status.candidates'), f"{sum(r.candidates for r in runs):,}")
    table.add_row(t('cli.status.jacobi_passed'), f"{sum(r.jacobi_passed for r in runs):,}")
    table.add_row(t('cli.status.counterexamples'), str(sum(r.counterexamples for r in runs)))
    table.add_row(t('cli.status.witnesses'), str(sum(r.witnesses for r in runs)))
    table.add_row(t('cli.status.skipped_budget'), str(sum(r.skipped_budget for r in runs)))
    table.add_row(t('cli.status.manifest_entries'), str(len(storage.read_manifest(ws))))
    console.print(table)

    if runs:
        recent = Table(title=t('cli.status.recent_title'))
        recent.add_column("run_id", style="dim")
        recent.add_column(t('cli.status.col_command'))
        recent.add_column(t('cli.status.col_dims'))
        recent.add_column(t('cli.status.col_duration'))
        for r in runs[-5:]:
            recent.add_row(r.run_id, r.command, ",".join(map(str, r.dims)), f"{r.duration:.2f}s")
        console.print(recent)


# lie

def _render_lie_report(payload: dict):
    table = Table(title=t('cli.lie.props_title', dim=payload["dim"]))
    table.add_column(t('cli.status.col_metric'), style="cyan")
    table.add_column(t('cli.status.col_value'))
    s = payload["series"]
    table.add_row(t('cli.lie.lower_central'), str(s["lower_central_dims"]))
    table.add_row(t('cli.lie.derived'), str(s["derived_dims"]))
    table.add_row(t('cli.lie.nilpotent'), _flag(s["nilpotent"]))
    for key in ("w1", "w2", "w2plus"):
        table.add_row(key.upper().replace("PLUS", "+"), _flag(payload[key]))
    table.add_row(t('cli.lie.annihilator'), str(payload["bracket_annihilator_size"]))
    verdict = payload.get("classification")
    table.add_row(t('cli.lie.verdict'), verdict["verdict"] if verdict else "-")
    console.print(table)


@lie_app.command("validate")
@guarded
def lie_validate(file: Path = typer.Argument(..., help="lief2-v1 file")):
    """Check the Jacobi identity on all basis triples."""
    L = lie.validate(formats.read_lief2(file))
    storage.log_manifest(_workspace(), "lie.validate", file, "ok")
    console.print(f"[green]{t('cli.lie.valid', path=file, dim=L.dim, count=len(L.structure))}[/green]")


@lie_app.command("props")
@guarded
def lie_props(
    file: Path = typer.Argument(..., help="lief2-v1 file"),
    budget_order: Optional[int] = typer.Option(None, "--budget-order", help="Largest loop order for the W2- test"),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the JSON report here"),
):
    """Series, W1, W2, W2+ and the all-or-none verdict."""
    _workspace()
    L = lie.validate(formats.read_lief2(file))
    s = lie.series(L)
    w2plus = lie.check_W2plus(L, "direct")
    if w2plus != lie.check_W2plus(L, "derived_series"):
        raise MethodDisagreement("W2+ methods disagree")
    classification = None
    if s.nilpotent:
        try:
            classification = survey.classify_lie(L, config.settings.effective_budget_order(budget_order))
        except LimitExceeded as e:
            err_console.print(f"[yellow]{t('cli.lie.skipped', msg=escape(str(e)))}[/yellow]")
    report = LieReport(
        dim=L.dim,
        series=s,
        w1=lie.check_W1(L),
        w2=lie.check_W2(L),
        w2plus=w2plus,
        bracket_annihilator_size=len(constructions.bracket_annihilator(L)),
        classification=classification,
    )
    _emit_report(report.model_dump(mode="json"), output, as_json, _render_lie_report)
    if classification and classification.verdict is not Verdict.CONSISTENT:
        raise typer.Exit(EXIT_FOUND)


@lie_app.command("to-loop")
@guarded
def lie_to_loop(
    file: Path = typer.Argument(..., help="lief2-v1 file"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the cayley-v1 table here"),
):
    """Build the loop x o y = x + y + [x, y]."""
    Q = constructions.lie_to_loop(formats.read_lief2(file))
    _emit_artifact(formats.dump_cayley(Q), output)
    storage.log_manifest(_workspace(), "lie.to-loop", file, "ok", dst=str(output) if output else None)


@lie_app.command("make")
@guarded
def lie_make(
    kind: CatalogKind = typer.Argument(..., help="abelian | heisenberg | free-nilpotent"),
    dim: Optional[int] = typer.Option(None, "--dim", help="Dimension (abelian, heisenberg)"),
    gens: Optional[int] = typer.Option(None, "--gens", help="Generators (free-nilpotent)"),
    nil_class: Optional[int] = typer.Option(None, "--class", help="Nilpotency class (free-nilpotent)"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the lief2-v1 file here"),
):
    """Write a catalog algebra."""
    L = lie.catalog_make(kind, dim=dim, gens=gens, nil_class=nil_class)
    _emit_artifact(formats.dump_lief2(L), output)


# loop

def _render_loop_report(payload: dict):
    table = Table(title=t('cli.loop.title', order=payload["order"]))
    table.add_column(t('cli.status.col_metric'), style="cyan")
    table.add_column(t('cli.status.col_value'))
    for key in ("commutative", "exponent2", "associative", "automorphic"):
        table.add_row(t(f'cli.loop.{key}'), _flag(payload[key]))
    for key in ("center", "nucleus_left", "nucleus_middle", "nucleus_right"):
        members = payload[key]
        shown = str(members) if len(members) <= 16 else f"{len(members)} {t('cli.loop.elements')}"
        table.add_row(t(f'cli.loop.{key}'), shown)
    if payload.get("split"):
        table.add_row(t('cli.loop.split'), f"K={payload['split']['K']} H={payload['split']['H']}")
    elif payload.get("nonsplit"):
        table.add_row(t('cli.loop.split'), f"[yellow]{t('cli.loop.nonsplit')}[/yellow]")
    console.print(table)


def _load_loop(file: Path) -> loops.FiniteLoop:
    """A cayley-v1 table, or the loop of a lief2-v1 algebra or a beta-v1 map."""
    data = formats.read_any(file)
    if isinstance(data, lie.LieAlgebraF2):
        return constructions.lie_to_loop(data)
    if isinstance(data, constructions.BetaMap):
        return constructions.beta_loop(data, verify=False)
    return data


@loop_app.command("analyze")
@guarded
def loop_analyze(
    file: Path = typer.Argument(..., help="cayley-v1, lief2-v1 or beta-v1 file"),
    split: bool = typer.Option(True, "--split/--no-split", help="Run the nuclear splitting search"),
    budget: Optional[int] = typer.Option(None, "--budget", help="Closure budget for subloop enumeration"),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the JSON report here"),
):
    """Flags, nuclei, center and splitting of a loop. Exit 1 when it is not automorphic."""
    ws = _workspace()
    Q = _load_loop(file)
    report = loops.analyze_loop(Q, split=split, budget=config.settings.effective_subloop_budget(budget))
    _emit_report(report.model_dump(mode="json"), output, as_json, _render_loop_report)
    storage.log_manifest(ws, "loop.analyze", file, "automorphic" if report.automorphic else "not_automorphic")
    if not report.automorphic:
        raise typer.Exit(EXIT_FOUND)


@loop_app.command("split")
@guarded
def loop_split(
    file: Path = typer.Argument(..., help="cayley-v1, lief2-v1 or beta-v1 file"),
    max_generators: Optional[int] = typer.Option(None, "--max-generators", help="Generators per subloop"),
    budget: Optional[int] = typer.Option(None, "--budget", help="Closure budget for subloop enumeration"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the JSON result here"),
):
    """Search for a nuclear splitting Q = HK. Exit 1 when none exists."""
    _workspace()
    Q = _load_loop(file)
    result = loops.nuclear_split(Q, max_generators=max_generators,
                                 budget=config.settings.effective_subloop_budget(budget))
    if isinstance(result, loops.SplitWitness):
        payload = {
            "splits": True,
            "K": list(result.K),
            "H": list(result.H),
            "phi": {f"{i},{j}": list(images) for (i, j), images in sorted(result.phi.items())},
        }
        _emit_report(payload, output, True)
        return
    payload = {"splits": False, **result.transcript().model_dump()}
    _emit_report(payload, output, True)
    raise typer.Exit(EXIT_FOUND)


# construct

def _report_built(Q, what: str):
    preds = Q.predicates
    err_console.print(t('cli.construct.built', what=what, order=Q.order,
                        center=len(Q.nuclei.center), associative=preds.associative))


@construct_app.command("beta")
@guarded
def construct_beta(
    file: Path = typer.Argument(..., help="beta-v1 file"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the cayley-v1 table here"),
):
    """Beta loop, checked against the Phi loop and the predicted center."""
    beta = formats.read_beta(file)
    Q = constructions.beta_loop(beta)
    constructions.u_isomorphism_check(beta)
    predicted = constructions.predicted_center(beta).elements()
    if predicted != Q.nuclei.center:
        raise CenterMismatch(f"predicted {len(predicted)} central elements, found {len(Q.nuclei.center)}")
    _report_built(Q, "beta")
    _emit_artifact(formats.dump_cayley(Q), output)
    storage.log_manifest(_workspace(), "construct.beta", file, "ok", dst=str(output) if output else None)


@construct_app.command("example1")
@guarded
def construct_example1(
    m: int = typer.Option(..., "--m", help="Extension degree of K = GF(2^m)"),
    delta: str = typer.Option(..., "--delta", help="Comma-separated images of the H basis, as field elements"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the cayley-v1 table here"),
):
    """beta(i) = multiplication by delta(i)."""
    try:
        columns = [int(part) for part in delta.split(",") if part.strip()]
    except ValueError:
        raise typer.BadParameter(t('cli.construct.bad_delta', value=delta))
    F = FieldF2m.standard(m)
    if any(not F.contains(c) for c in columns):
        raise typer.BadParameter(t('cli.construct.bad_delta', value=delta))
    Q = constructions.example1_loop(F, BitMatrix.from_columns(columns, m))
    _report_built(Q, f"example1 m={m}")
    _emit_artifact(formats.dump_cayley(Q), output)


@construct_app.command("example2")
@guarded
def construct_example2(
    m: int = typer.Option(..., "--m", help="K = GF(2^m)"),
    d: int = typer.Option(..., "--d", help="H = GF(2^d), d a proper divisor of m"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the cayley-v1 table here"),
):
    """beta(i) = multiplication by sigma*i with H a proper subfield."""
    Q = constructions.example2_loop(m, d)
    _report_built(Q, f"example2 m={m} d={d}")
    _emit_artifact(formats.dump_cayley(Q), output)


@construct_app.command("horajed")
@construct_app.command("fixed-vector", hidden=True)
@guarded
def construct_fixed_vector(
    k_dim: int = typer.Option(2, "--k-dim", help="Dimension of K"),
    h_dim: int = typer.Option(1, "--h-dim", help="Dimension of H"),
    seed: int = typer.Option(0, "--seed", help="Seed for X and m"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the cayley-v1 table here"),
):
    """Loop from a seeded X with X^2 = 0; reports a central fixed vector."""
    import random

    X, m = constructions.random_square_zero_family(k_dim, h_dim, random.Random(seed))
    Q, a = constructions.fixed_vector_witness(X, m)
    err_console.print(t('cli.construct.fixed_point', element=a, center=len(Q.nuclei.center)))
    _emit_artifact(formats.dump_cayley(Q), output)


# scan

def _render_scans(payload):
    reports = payload if isinstance(payload, list) else [payload]
    table = Table(title=t('cli.scan.problem1_title'))
    for col in ("dim", "candidates", "jacobi_passed", "consistent", "w2_true", "w2_false", "skipped_budget", "counterexamples"):
        table.add_column(t(f'cli.scan.cols.{col}'))
    for r in reports:
        table.add_row(*(str(r[c]) for c in ("dim", "candidates", "jacobi_passed", "consistent",
                                             "w2_true", "w2_false", "skipped_budget")),
                      str(len(r["counterexamples"])))
    console.print(table)


def _render_nonsplit(payload):
    reports = payload if isinstance(payload, list) else [payload]
    table = Table(title=t('cli.scan.nonsplit_title'))
    for col in ("dim", "candidates", "jacobi_passed", "index4", "automorphic", "skipped_budget", "witnesses"):
        table.add_column(t(f'cli.scan.cols.{col}'))
    for r in reports:
        table.add_row(*(str(r[c]) for c in ("dim", "candidates", "jacobi_passed", "index4",
                                             "automorphic", "skipped_budget")),
                      str(len(r["witnesses"])))
    console.print(table)


def _scan_mode(exhaustive: bool, samples: Optional[int]) -> ScanMode:
    if exhaustive == (samples is not None):
        raise typer.BadParameter(t('cli.scan.mode_required'))
    return ScanMode.EXHAUSTIVE if exhaustive else ScanMode.SAMPLED


@scan_app.command("problem1")
@guarded
def scan_problem1(
    dim: str = typer.Option(..., "--dim", help="Dimension or range a..b"),
    exhaustive: bool = typer.Option(False, "--exhaustive", help="Enumerate every flag-adapted pattern"),
    samples: Optional[int] = typer.Option(None, "--samples", min=0, help="Number of seeded draws"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Sampling seed"),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Worker processes"),
    budget_order: Optional[int] = typer.Option(None, "--budget-order", min=1, help="Largest loop order for the W2- test"),
    table: Optional[Path] = typer.Option(None, "--table", help="Write per-algebra rows as CSV"),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the JSON report here"),
):
    """Does W2- imply W2, and W2 imply W2+? Exit 1 on a counterexample."""
    dims = _parse_dims(dim)
    mode = _scan_mode(exhaustive, samples)
    ws = _workspace()
    settings = config.settings
    tm = telemetry.Telemetry(ws, "scan problem1")
    tm.start_stage("total")
    reports, rows = [], []
    for n in dims:
        tm.start_stage(f"dim{n}")
        report = survey.scan_problem1(
            n, mode, samples=samples, seed=settings.config.seed if seed is None else seed,
            budget_order=settings.effective_budget_order(budget_order),
            jobs=settings.effective_jobs(jobs), collect_rows=table is not None,
            progress=settings.config.progress,
        )
        tm.end_stage(f"dim{n}")
        tm.record(report)
        reports.append(report)
        rows.extend(report._rows)
        if report.skipped_budget:
            err_console.print(f"[yellow]{t('cli.scan.skipped', count=report.skipped_budget, dim=n)}[/yellow]")
    tm.end_stage("total")
    tm.save()

    if table is not None:
        count = export.write_scan_table(rows, table, localized=True)
        err_console.print(f"[green]{t('cli.scan.table_written', path=table, count=count)}[/green]")
    dumped = [r.model_dump(mode="json") for r in reports]
    _emit_report(dumped[0] if len(dumped) == 1 else dumped, output, as_json, _render_scans)
    if mode is ScanMode.SAMPLED:
        for r in reports:
            if not r.jacobi_passed:
                err_console.print(f"[yellow]{t('cli.scan.none_classified', dim=r.dim)}[/yellow]")
            for branch, hits in (("w2=true", r.w2_true), ("w2=false", r.w2_false)):
                if not hits:
                    err_console.print(f"[yellow]{t('cli.scan.branch_missed', dim=r.dim, branch=branch)}[/yellow]")
    if any(r.counterexamples for r in reports):
        raise typer.Exit(EXIT_FOUND)


@scan_app.command("nonsplit")
@guarded
def scan_nonsplit(
    dim: str = typer.Option(..., "--dim", help="Dimension or range a..b"),
    exhaustive: bool = typer.Option(False, "--exhaustive", help="Enumerate every flag-adapted pattern"),
    samples: Optional[int] = typer.Option(None, "--samples", min=0, help="Number of seeded draws"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Sampling seed"),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Worker processes"),
    budget: Optional[int] = typer.Option(None, "--budget", help="Closure budget for subloop enumeration"),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the JSON report here"),
):
    """Loops with middle-nucleus index 4 that do not split nuclearly. Exit 1 when one is found."""
    dims = _parse_dims(dim)
    mode = _scan_mode(exhaustive, samples)
    ws = _workspace()
    settings = config.settings
    tm = telemetry.Telemetry(ws, "scan nonsplit")
    tm.start_stage("total")
    reports = []
    for n in dims:
        report = survey.scan_nonsplit(
            n, mode, samples=samples, seed=settings.config.seed if seed is None else seed,
            budget=settings.effective_subloop_budget(budget), jobs=settings.effective_jobs(jobs),
            progress=settings.config.progress,
        )
        tm.record(report)
        reports.append(report)
    tm.end_stage("total")
    tm.save()

    dumped = [r.model_dump(mode="json") for r in reports]
    _emit_report(dumped[0] if len(dumped) == 1 else dumped, output, as_json, _render_nonsplit)
    if any(r.witnesses for r in reports):
        raise typer.Exit(EXIT_FOUND)


@scan_app.command("coverage")
@guarded
def scan_coverage(
    dim: int = typer.Option(..., "--dim", min=0, max=survey.MAX_ISOMORPHISM_DIM, help="Dimension"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help="Write the JSON report here"),
):
    """Check that flag-adapted tables reach every nilpotent isomorphism class. Exit 1 on a gap."""
    report = survey.verify_flag_coverage(dim)
    _emit_report(report.model_dump(mode="json"), output, True)
    if report.uncovered:
        raise typer.Exit(EXIT_FOUND)


if __name__ == "__main__":
    app()
