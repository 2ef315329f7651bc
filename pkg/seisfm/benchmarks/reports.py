"""Report files of an experiment: CSV and JSON tables plus SVG scatter plots.

A table has one line per (grid row, task). Failed rows keep the records of
the tasks that finished and add one line with task `failed` and empty
metrics, so a report always shows every grid point.
"""
import csv
import json
import logging
import os

import matplotlib
from matplotlib.figure import Figure
from matplotlib.lines import Line2D

from encoders.config import CONV, GLOBAL, HYBRID, WINDOWED
from training.downstream import FINE_TUNED, FROZEN, SCRATCH


logger = logging.getLogger(__name__)


CSV_COLUMNS = ('name', 'archetype', 'hierarchical', 'strategy', 'params_encoder', 'params_total', 'task', 'mse',
               'psnr_db', 'ssim', 'ssim_combined', 'latency_s', 'throughput_gps')
INT_COLUMNS = ('params_encoder', 'params_total')
FLOAT_COLUMNS = ('mse', 'psnr_db', 'ssim', 'ssim_combined', 'latency_s', 'throughput_gps')
FAILED_TASK = 'failed'

STRATEGY_MARKERS = {FROZEN: 's', FINE_TUNED: 'o', SCRATCH: '^'}
ARCHETYPE_COLORS = {CONV: '#1f77b4', WINDOWED: '#2ca02c', GLOBAL: '#d62728', HYBRID: '#9467bd'}
AXIS_LABELS = {
    'params': 'Parameters (encoder + decoder)',
    'dataset_size': 'Training samples per task',
    'latency': 'Inference latency per batch (s)',
}
SVG_PARAMS = {'svg.hashsalt': 'seisfm', 'svg.fonttype': 'none'}


class ReportError(ValueError):
    pass


def _number(value):
    return '' if value is None else repr(float(value))


def report_lines(rows):
    """Flat report lines (dicts keyed by CSV_COLUMNS, plus decoder/dataset_size/error)."""
    lines = []
    for row in rows:
        common = {
            'name': row.name,
            'archetype': row.archetype,
            'hierarchical': bool(row.hierarchical),
            'strategy': row.strategy,
            'params_encoder': int(row.params_encoder),
            'params_total': int(row.params_total),
            'decoder': row.decoder,
            'dataset_size': int(row.dataset_size),
        }
        combined = row.combined.combined if row.combined is not None else None
        for task, record in row.ordered_records():
            lines.append(dict(common, task=task, mse=record.mse, psnr_db=record.psnr, ssim=record.ssim,
                              ssim_combined=combined, latency_s=record.latency,
                              throughput_gps=record.throughput, error=''))
        if row.failed:
            empty = {c: None for c in FLOAT_COLUMNS}
            lines.append(dict(common, task=FAILED_TASK, error=row.error, **empty))
    return lines


def _csv_cell(column, value):
    if column == 'hierarchical':
        return 'true' if value else 'false'
    if column in FLOAT_COLUMNS:
        return _number(value)
    return str(value)


def _parse_cell(column, text):
    if column == 'hierarchical':
        return text == 'true'
    if column in INT_COLUMNS:
        return int(text)
    if column in FLOAT_COLUMNS:
        return float(text) if text != '' else None
    return text


def _prepare(path):
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)


def emit_report(rows, fmt, path):
    """Writes the report table as `csv` or `json`; returns the number of lines."""
    lines = report_lines(rows)
    try:
        _prepare(path)
        with open(path, 'w', newline='') as f:
            if fmt == 'csv':
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(CSV_COLUMNS)
                for line in lines:
                    writer.writerow([_csv_cell(c, line[c]) for c in CSV_COLUMNS])
            elif fmt == 'json':
                json.dump({'columns': list(CSV_COLUMNS), 'rows': lines}, f, indent=2, sort_keys=True)
                f.write('\n')
            else:
                raise ReportError("Unknown report format '%s' (expected csv or json)" % fmt)
    except OSError as e:
        raise ReportError("Cannot write report %s: %s" % (path, e))
    logger.info("Wrote %d %s report lines to %s", len(lines), fmt, path)
    return len(lines)


def read_report(path):
    """Report lines of a CSV or JSON report, restricted to CSV_COLUMNS."""
    with open(path, newline='') as f:
        if os.fspath(path).endswith('.json'):
            return [{c: line[c] for c in CSV_COLUMNS} for line in json.load(f)['rows']]
        return [{c: _parse_cell(c, line[c]) for c in CSV_COLUMNS} for line in csv.DictReader(f)]


def _x_value(row, x_axis):
    if x_axis == 'params':
        return row.params_total
    if x_axis == 'dataset_size':
        return row.dataset_size
    if x_axis == 'latency':
        return row.latency
    raise ReportError("Unknown scatter axis '%s' (expected %s)" % (x_axis, ", ".join(AXIS_LABELS)))


def scatter_points(rows, x_axis, min_combined=None):
    """(x, score, row) for every plotted row; failed rows without records are left out."""
    if not rows:
        raise ReportError("Cannot plot an empty report")
    points = [(_x_value(r, x_axis), r.score, r) for r in rows if r.records]
    if min_combined is not None:
        points = [p for p in points if p[1] > min_combined]
    if not points:
        raise ReportError("No report rows left to plot on the %s axis" % x_axis)
    return points


def emit_scatter(rows, x_axis, path, log_x=False, min_combined=None):
    """Combined SSIM against `x_axis` as an SVG file, one marker per row.

    Marker shape encodes the training strategy and colour the encoder
    archetype. Each marker is an SVG group with id `marker-<n>`.
    """
    points = scatter_points(rows, x_axis, min_combined)
    if log_x and min(p[0] for p in points) <= 0:
        raise ReportError("A log-scaled %s axis needs positive values" % x_axis)
    combined = all(p[2].combined is not None for p in points)

    with matplotlib.rc_context(SVG_PARAMS):
        figure = Figure(figsize=(6.4, 4.8))
        ax = figure.add_subplot(1, 1, 1)
        for i, (x, y, row) in enumerate(points):
            ax.scatter([x], [y], marker=STRATEGY_MARKERS.get(row.strategy, 'o'),
                       color=ARCHETYPE_COLORS.get(row.archetype, '#7f7f7f'), gid='marker-%d' % i)
        if log_x:
            ax.set_xscale('log')
        ax.set_xlabel(AXIS_LABELS[x_axis])
        ax.set_ylabel('Combined SSIM' if combined else 'Mean SSIM')
        ax.grid(True, alpha=0.3)

        handles = [Line2D([], [], linestyle='none', marker=STRATEGY_MARKERS[s], color='#404040', label=s)
                   for s in sorted({p[2].strategy for p in points}) if s in STRATEGY_MARKERS]
        handles += [Line2D([], [], linestyle='none', marker='o', color=ARCHETYPE_COLORS[a], label=a)
                    for a in sorted({p[2].archetype for p in points}) if a in ARCHETYPE_COLORS]
        ax.legend(handles=handles, loc='best', fontsize=7)
        try:
            _prepare(path)
            figure.savefig(path, format='svg', metadata={'Date': None})
        except OSError as e:
            raise ReportError("Cannot write scatter plot %s: %s" % (path, e))
    logger.info("Wrote %d-marker %s scatter plot to %s", len(points), x_axis, path)
    return len(points)


def emit_all(rows, directory, report_settings):
    """Every table and plot the report settings ask for; returns the written paths."""
    paths = []
    for fmt in report_settings.formats:
        path = os.path.join(directory, 'report.%s' % fmt)
        emit_report(rows, fmt, path)
        paths.append(path)
    for x_axis in report_settings.scatter:
        path = os.path.join(directory, 'scatter_%s.svg' % x_axis)
        try:
            emit_scatter(rows, x_axis, path, x_axis in report_settings.log_x, report_settings.min_combined)
        except ReportError as e:
            logger.warning("Skipped %s scatter plot: %s", x_axis, e)
            continue
        paths.append(path)
    return paths
