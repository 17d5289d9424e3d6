"""Reporting generator.

Writes the JSON report of a command and renders its plain-text summary from
a Jinja2 template. The JSON file is the artifact; the text is for people.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from jinja2 import Environment, FileSystemLoader, select_autoescape

from drinfeldlab.lab.codec import write_json
from drinfeldlab.lab.experiments import ScanReport

TEMPLATE_DIR = Path(__file__).with_name("templates")


def render_text(report: ScanReport, template_dir: Path = TEMPLATE_DIR) -> str:
    env = Environment(
        loader=FileSystemLoader(str(template_dir)),
        autoescape=select_autoescape(["html"]),
        trim_blocks=True,
        lstrip_blocks=True,
    )
    return env.get_template("report.txt.j2").render(report=report.to_dict())


def generate_reports(report: ScanReport, out: Optional[Path] = None, template_dir: Path = TEMPLATE_DIR) -> str:
    """Write `out` (JSON) and `<out>.txt` when `out` is given; return the text summary."""
    text = render_text(report, template_dir)
    if out is not None:
        out = Path(out)
        write_json(out, report.to_dict())
        out.with_name(out.name + ".txt").write_text(text, encoding="utf-8")
    return text
