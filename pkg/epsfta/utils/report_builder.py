"""
EPSFTA Report Builder

Assembles analysis results into a report and renders it as text (Markdown
with a YAML front matter provenance block), HTML, structured JSON or CSV.
Given the same document every format renders byte-identical output.
"""
import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import frontmatter
import markdown

from epsfta.errors import ReportError
from epsfta.utils.cut_sets import format_cut_sets
from epsfta.utils.risk_matrix import render_text
from epsfta.utils.scenario_enumerator import TABLE_HEADER, format_stats, stats_as_dict, stats_rows

logger = logging.getLogger(__name__)

FORMATS = ('text', 'structured', 'csv', 'html')


@dataclass(frozen=True)
class Provenance:
    input_sha256: str
    tool_version: str
    timestamp: str = None
    tree_name: str = ''
    mission_hours: float = None
    method: str = None

    @classmethod
    def create(cls, input_sha256, tool_version, include_timestamp=True, **kwargs):
        stamp = None
        if include_timestamp:
            stamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
        return cls(input_sha256, tool_version, stamp, **kwargs)

    def as_dict(self):
        return {key: value for key, value in asdict(self).items() if value is not None}


@dataclass(frozen=True)
class ReportDocument:
    """Everything one report can show; every part except provenance is optional."""
    provenance: Provenance
    quant: object = None
    cut_sets: object = None
    scenarios: object = None
    risk: object = None
    summary: dict = None
    curve: tuple = None

    def __post_init__(self):
        if not isinstance(self.provenance, Provenance):
            raise ReportError('a report needs a provenance block')
        if self.quant is not None:
            bad = [label for label, value in self.quant.rows() if not math.isfinite(value)]
            if bad:
                raise ReportError(f"non-finite report values: {', '.join(bad)}")
        if self.curve is not None and not all(math.isfinite(r) for _, r in self.curve):
            raise ReportError('non-finite reliability curve')

    def as_dict(self):
        data = {'provenance': self.provenance.as_dict()}
        if self.summary is not None:
            data['summary'] = self.summary
        if self.quant is not None:
            data['results'] = self.quant.as_dict()
        if self.cut_sets is not None:
            data['cut_sets'] = self.cut_sets.as_records()
        if self.scenarios is not None:
            data['scenarios'] = stats_as_dict(self.scenarios)
        if self.risk is not None:
            data['risk_matrix'] = self.risk.as_records()
        if self.curve is not None:
            data['reliability_curve'] = [{'t': t, 'reliability': r} for t, r in self.curve]
        return data


def _format_value(value):
    return f"{value:.6f}" if abs(value) >= 1e-4 or value == 0 else f"{value:.6e}"


def render_markdown(doc):
    """Markdown body of the text report (without the front matter)."""
    title = doc.provenance.tree_name or 'fault tree'
    parts = [f"# Reliability report: {title}", '']

    if doc.summary is not None:
        parts += [f"No. of Gates: {doc.summary['gates']}",
                  f"No. of Events: {doc.summary['events']}", '']

    if doc.quant is not None:
        parts += ['## Results', '', '| Value | Result |', '| --- | --- |']
        parts += [f"| {label} | {_format_value(value)} |" for label, value in doc.quant.rows()]
        parts.append('')

    if doc.curve:
        parts += ['## Reliability over time', '', '| t (h) | Reliability |', '| --- | --- |']
        parts += [f"| {t:g} | {_format_value(r)} |" for t, r in doc.curve]
        parts.append('')

    if doc.cut_sets is not None:
        parts += ['## Minimal cut sets', '', '```', format_cut_sets(doc.cut_sets).rstrip('\n'), '```', '']

    if doc.scenarios is not None:
        parts += ['## Fault scenarios', '', '```', format_stats(doc.scenarios).rstrip('\n'), '```', '']

    if doc.risk is not None:
        parts += ['## Risk matrix', '', '```', render_text(doc.risk).rstrip('\n'), '```', '']
    return '\n'.join(parts)


def _text(doc):
    post = frontmatter.Post(render_markdown(doc), **doc.provenance.as_dict())
    return frontmatter.dumps(post) + '\n'


def _html(doc):
    body = markdown.markdown(render_markdown(doc), extensions=['fenced_code', 'tables'])
    title = doc.provenance.tree_name or 'fault tree'
    meta = ''.join(f"<li>{key}: {value}</li>" for key, value in sorted(doc.provenance.as_dict().items()))
    return (f"<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>{title}</title></head>\n"
            f"<body>\n{body}\n<ul class=\"provenance\">{meta}</ul>\n</body>\n</html>\n")


def _structured(doc):
    return json.dumps(doc.as_dict(), sort_keys=True, indent=2) + '\n'


def _csv(doc):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    if doc.scenarios is not None:
        writer.writerow(TABLE_HEADER)
        for m, n, s, r, f, p in stats_rows(doc.scenarios):
            writer.writerow((m, n, s, r, f, repr(p)))
    elif doc.quant is not None:
        writer.writerow(('value', 'result'))
        for label, value in doc.quant.rows():
            writer.writerow((label, repr(value)))
    elif doc.cut_sets is not None:
        writer.writerow(('size', 'events'))
        for cut_set in doc.cut_sets:
            writer.writerow((cut_set.size, ' '.join(cut_set.events)))
    else:
        raise ReportError('nothing to write as CSV')
    return buffer.getvalue()


_RENDERERS = {'text': _text, 'html': _html, 'structured': _structured, 'csv': _csv}


def emit_report(doc, fmt='text'):
    """Render a report.

    Args:
        doc: ReportDocument
        fmt: 'text', 'structured', 'csv' or 'html'

    Returns:
        UTF-8 bytes
    """
    renderer = _RENDERERS.get(fmt)
    if renderer is None:
        raise ReportError(f"unknown report format {fmt!r}; expected one of {', '.join(FORMATS)}")
    return renderer(doc).encode('utf-8')
