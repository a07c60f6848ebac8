"""Command-line entry points.

Exit codes are part of the contract:

* ``validate`` — 0 clean, 1 issues found, 2 unreadable input
* ``apply``    — 0 everything applied, 1 rejected/failed/nothing to do,
                 2 input error, 4 backend error
* ``eval``     — 0 batch completed (per-case failures are data), 2 bad case dir
* ``serve``    — 2 bad config, 3 bind failure
"""

from __future__ import annotations

import json
import os
import socket
import sys
from pathlib import Path

import click

from .agent import (ProposalStatus, build_memory, execute,
                    parse_structured_request, plan, route)
from .edit import action_to_json
from .errors import (BackendError, EmptyCaseSetError, MalformedPlanError,
                     MalformedRouterOutputError, ProtoAgentError)
from .evaluation import run_benchmark
from .llm import (ChatGateway, GatewayConfig, load_gateway_config,
                  make_chat_backend)
from .model import (ValidationReport, load_rules, parse_protocol,
                    serialize_protocol, validate_structure, validate_syntax)

CONFIG_ENV = "PROTOAGENT_CONFIG"


def _load_config(path: str | None) -> GatewayConfig:
    path = path or os.environ.get(CONFIG_ENV)
    if path is None:
        return GatewayConfig(backend="mock")
    return load_gateway_config(path)


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
@click.option("--json", "json_output", is_flag=True,
              help="Emit machine-readable JSON instead of prose.")
@click.pass_context
def main(ctx, json_output):
    """Edit scan protocols through a reviewable agent pipeline."""
    ctx.ensure_object(dict)
    ctx.obj["json"] = json_output


# --- serve ----------------------------------------------------------------


@main.command()
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store-dir", default="./sessions", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--config", "config_path", default=None,
              type=click.Path(dir_okay=False))
def serve(port, host, store_dir, config_path):
    """Run the HTTP review service."""
    try:
        config = _load_config(config_path)
        cors = None
        raw_path = config_path or os.environ.get(CONFIG_ENV)
        if raw_path:
            raw = json.loads(Path(raw_path).read_text(encoding="utf-8"))
            cors = raw.get("service", {}).get("cors_origins")
    except (ProtoAgentError, OSError, json.JSONDecodeError) as exc:
        _fail(f"bad config: {exc}", 2)

    # claim the port up front so a taken port is a clean exit, not a stack trace
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as exc:
        probe.close()
        _fail(f"cannot bind {host}:{port}: {exc}", 3)
    probe.close()

    from .service import create_app

    app = create_app(store_dir=store_dir, config=config, cors_origins=cors)
    click.echo(f"serving on http://{host}:{port} (store: {store_dir}, "
               f"backend: {config.backend})")
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="warning")


# --- validate -------------------------------------------------------------


@main.command()
@click.argument("protocol_path", type=click.Path(dir_okay=False))
@click.option("--rules", "rules_path", default=None,
              type=click.Path(dir_okay=False))
@click.option("--strict", is_flag=True,
              help="Also reject unknown entity types and essentials.")
@click.pass_context
def validate(ctx, protocol_path, rules_path, strict):
    """Check a protocol file for syntax and structure-rule issues."""
    try:
        xml_text = Path(protocol_path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(str(exc), 2)

    report = validate_syntax(xml_text, strict=strict)
    if report.ok:
        try:
            rules = load_rules(rules_path)
        except (ProtoAgentError, OSError) as exc:
            _fail(f"cannot load rules: {exc}", 2)
        doc = parse_protocol(xml_text, strict=strict)
        structure = validate_structure(doc, rules)
        report = ValidationReport(issues=report.issues + structure.issues)

    if ctx.obj["json"]:
        click.echo(json.dumps(report.to_json(), indent=2, sort_keys=True))
    elif not report.issues:
        click.echo(f"{protocol_path}: ok")
    else:
        for issue in report.issues:
            click.echo(f"{issue.severity}: [{issue.code}] {issue.path}: "
                       f"{issue.message}")
    sys.exit(0 if report.ok else 1)


# --- apply ----------------------------------------------------------------


def _print_proposal(proposal, json_output: bool) -> None:
    if json_output:
        return
    click.echo(f"\n{proposal.id} [{proposal.status.value}] "
               f"({proposal.subrequest.category.value})")
    click.echo(f"  request: {proposal.subrequest.text}")
    click.echo(f"  plan: {proposal.plan_text}")
    for action in proposal.actions:
        click.echo(f"  action: {json.dumps(action_to_json(action), sort_keys=True)}")
    if proposal.low_confidence:
        click.echo("  note: low confidence — more than one entity matched")


@main.command()
@click.argument("protocol_path", type=click.Path(dir_okay=False))
@click.option("--request", "request_text", default=None,
              help="Natural-language request.")
@click.option("--request-json", "request_json_path", default=None,
              type=click.Path(dir_okay=False),
              help="Path to a structured JSON request.")
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--yes/--interactive", default=False,
              help="Auto-approve every proposal instead of prompting.")
@click.option("--script", "script_path", default=None,
              type=click.Path(dir_okay=False),
              help="Reply script for the mock backend.")
@click.option("--config", "config_path", default=None,
              type=click.Path(dir_okay=False))
@click.pass_context
def apply(ctx, protocol_path, request_text, request_json_path, out_path, yes,
          script_path, config_path):
    """Plan one request against a protocol file and apply approved edits."""
    json_output = ctx.obj["json"]
    if (request_text is None) == (request_json_path is None):
        _fail("give exactly one of --request or --request-json", 2)

    try:
        xml_text = Path(protocol_path).read_text(encoding="utf-8")
        doc = parse_protocol(xml_text)
        config = _load_config(config_path)
    except OSError as exc:
        _fail(str(exc), 2)
    except ProtoAgentError as exc:
        _fail(f"{exc.code}: {exc.message}", 2)

    rules = load_rules()
    try:
        if request_text is not None:
            gateway = ChatGateway(make_chat_backend(config,
                                                    script_path=script_path))
            subs = route(request_text, gateway)
        else:
            gateway = None
            subs = parse_structured_request(
                Path(request_json_path).read_text(encoding="utf-8"))
    except OSError as exc:
        _fail(str(exc), 2)
    except (BackendError, MalformedRouterOutputError) as exc:
        _fail(f"{exc.code}: {exc.message}", 4)
    except ProtoAgentError as exc:
        _fail(f"{exc.code}: {exc.message}", 2)

    memory = build_memory(doc)
    results = []
    all_applied = True
    for sub in subs:
        if not sub.dispatchable:
            all_applied = False
            if not json_output:
                click.echo(f"\nskipped ({sub.category.value}): {sub.text}")
                click.echo(f"  reason: {sub.rationale}")
            results.append({"status": "NotDispatchable", "text": sub.text,
                            "rationale": sub.rationale})
            continue
        try:
            proposal = plan(sub, doc, memory, gateway, rules=rules,
                            proposal_id=f"prop-{len(results) + 1}")
        except (BackendError, MalformedPlanError) as exc:
            _fail(f"{exc.code}: {exc.message}", 4)
        _print_proposal(proposal, json_output)

        if proposal.status is ProposalStatus.FAILED:
            all_applied = False
            results.append(proposal.to_json())
            continue
        if yes or click.confirm("apply this proposal?", default=False):
            proposal = proposal.advance(ProposalStatus.APPROVED)
            proposal, result = execute(proposal, doc, rules=rules)
            if proposal.status is ProposalStatus.APPLIED:
                doc = result.document
                memory = build_memory(doc)
                if not json_output:
                    click.echo("  -> applied")
            else:
                all_applied = False
                if not json_output:
                    click.echo(f"  -> failed: {proposal.error}")
        else:
            proposal = proposal.advance(ProposalStatus.REJECTED)
            all_applied = False
            if not json_output:
                click.echo("  -> rejected")
        results.append(proposal.to_json())

    applied = [r for r in results if r.get("status") == "Applied"]
    if all_applied and applied and out_path is not None:
        Path(out_path).write_text(serialize_protocol(doc), encoding="utf-8")
        if not json_output:
            click.echo(f"\nwrote {out_path}")
    if json_output:
        click.echo(json.dumps({"proposals": results,
                               "all_applied": bool(all_applied and applied)},
                              indent=2, sort_keys=True))
    sys.exit(0 if all_applied and applied else 1)


# --- eval -----------------------------------------------------------------


@main.command("eval")
@click.option("--cases", "cases_dir", required=True,
              type=click.Path(file_okay=False))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@click.option("--config", "config_path", default=None,
              type=click.Path(dir_okay=False))
@click.option("--pseudo-count", default=10, show_default=True, type=int)
@click.pass_context
def eval_command(ctx, cases_dir, out_dir, config_path, pseudo_count):
    """Run the benchmark over a case directory and write reports."""
    try:
        config = _load_config(config_path)
    except ProtoAgentError as exc:
        _fail(f"bad config: {exc}", 2)
    try:
        report = run_benchmark(cases_dir, config=config, out_dir=out_dir,
                               pseudo_count=pseudo_count)
    except EmptyCaseSetError as exc:
        _fail(str(exc), 2)

    if ctx.obj["json"]:
        click.echo(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        click.echo(report.to_markdown())
        if out_dir is not None:
            click.echo(f"reports written to {out_dir}")
    sys.exit(0)


if __name__ == "__main__":
    main()
