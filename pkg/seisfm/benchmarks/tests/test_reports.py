import math
import os
import tempfile
import unittest
import xml.etree.ElementTree as ET

from benchmarks.config import ReportSettings
from benchmarks.reports import (
    CSV_COLUMNS,
    FAILED_TASK,
    ReportError,
    emit_all,
    emit_report,
    emit_scatter,
    read_report,
    report_lines,
)
from encoders import GLOBAL, HYBRID, WINDOWED
from metrics import PSNR_CAP
from seisdata import DEMULTIPLE, INTERPOLATION, TASKS
from training.downstream import FINE_TUNED, FROZEN

import benchmarks.tests.helper as helper

SVG_GROUP = '{http://www.w3.org/2000/svg}g'


def marker_ids(path):
    root = ET.parse(path).getroot()
    return [g.get('id') for g in root.iter(SVG_GROUP) if (g.get('id') or '').startswith('marker-')]


class ReportTableTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.rows = [
            helper.create_row(),
            helper.create_row('vit-tiny', GLOBAL, FROZEN, ssim=0.5, params=(400, 460)),
        ]

    def tearDown(self):
        self.directory.cleanup()

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def test_csv_header_and_lines(self):
        count = emit_report(self.rows[:1], 'csv', self.path('r.csv'))
        with open(self.path('r.csv')) as f:
            lines = f.read().splitlines()
        self.assertEqual(count, 3)
        self.assertEqual(len(lines), 4)
        self.assertEqual(lines[0], ','.join(CSV_COLUMNS))
        self.assertEqual([line.split(',')[6] for line in lines[1:]], list(TASKS))

    def test_csv_values(self):
        emit_report(self.rows, 'csv', self.path('r.csv'))
        lines = read_report(self.path('r.csv'))
        first = lines[0]
        self.assertEqual(first['name'], 'conv-tiny')
        self.assertIs(first['hierarchical'], True)
        self.assertEqual(first['params_encoder'], 100)
        self.assertEqual(first['params_total'], 150)
        self.assertEqual(first['ssim_combined'], self.rows[0].combined.combined)
        self.assertIs(lines[3]['hierarchical'], False)
        for line in lines:
            for column in ('mse', 'psnr_db', 'ssim', 'latency_s', 'throughput_gps'):
                self.assertTrue(math.isfinite(line[column]))

    def test_json_and_csv_agree(self):
        emit_report(self.rows, 'csv', self.path('r.csv'))
        emit_report(self.rows, 'json', self.path('r.json'))
        self.assertEqual(read_report(self.path('r.csv')), read_report(self.path('r.json')))

    def test_stable_bytes(self):
        emit_report(self.rows, 'csv', self.path('a.csv'))
        emit_report(self.rows, 'csv', self.path('b.csv'))
        with open(self.path('a.csv'), 'rb') as a, open(self.path('b.csv'), 'rb') as b:
            self.assertEqual(a.read(), b.read())

    def test_psnr_cap_is_numeric(self):
        row = helper.create_row(tasks=(DEMULTIPLE,))
        record = row.records[DEMULTIPLE]
        row.records[DEMULTIPLE] = record.__class__(DEMULTIPLE, 0.0, PSNR_CAP, 1.0)
        emit_report([row], 'csv', self.path('r.csv'))
        self.assertEqual(read_report(self.path('r.csv'))[0]['psnr_db'], 99.0)

    def test_partial_row_has_no_combined_score(self):
        emit_report([helper.create_row(tasks=(INTERPOLATION,))], 'csv', self.path('r.csv'))
        self.assertIsNone(read_report(self.path('r.csv'))[0]['ssim_combined'])

    def test_failed_row_is_marked(self):
        failed = helper.create_row(tasks=(DEMULTIPLE,), failed=True, error='ShapeError: bad pyramid')
        emit_report([failed], 'csv', self.path('r.csv'))
        emit_report([failed], 'json', self.path('r.json'))
        lines = read_report(self.path('r.csv'))
        self.assertEqual([line['task'] for line in lines], [DEMULTIPLE, FAILED_TASK])
        self.assertIsNone(lines[1]['ssim'])
        self.assertEqual(lines, read_report(self.path('r.json')))
        self.assertEqual(report_lines([failed])[1]['error'], 'ShapeError: bad pyramid')

    def test_unknown_format(self):
        with self.assertRaises(ReportError):
            emit_report(self.rows, 'xlsx', self.path('r.xlsx'))

    def test_unwritable_path(self):
        blocker = self.path('file')
        with open(blocker, 'w') as f:
            f.write('x')
        with self.assertRaises(ReportError):
            emit_report(self.rows, 'csv', os.path.join(blocker, 'r.csv'))


class ScatterTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.rows = [
            helper.create_row('conv-tiny', ssim=0.95, params=(100, 150), dataset_size=250),
            helper.create_row('conv-tiny', strategy=FROZEN, ssim=0.9, params=(100, 150), dataset_size=500),
            helper.create_row('swin-tiny', WINDOWED, FINE_TUNED, ssim=0.85, params=(200, 260), dataset_size=1000),
            helper.create_row('vit-tiny', GLOBAL, ssim=0.6, params=(400, 460), dataset_size=2000),
            helper.create_row('hybrid-tiny', HYBRID, ssim=0.8, params=(300, 350), dataset_size=2000),
        ]

    def tearDown(self):
        self.directory.cleanup()

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def test_one_marker_per_row(self):
        count = emit_scatter(self.rows, 'params', self.path('s.svg'))
        self.assertEqual(count, 5)
        self.assertEqual(len(marker_ids(self.path('s.svg'))), 5)

    def test_axes_labelled(self):
        emit_scatter(self.rows, 'dataset_size', self.path('s.svg'), log_x=True)
        with open(self.path('s.svg')) as f:
            svg = f.read()
        self.assertIn('Training samples per task', svg)
        self.assertIn('Combined SSIM', svg)

    def test_deterministic_svg(self):
        emit_scatter(self.rows, 'params', self.path('a.svg'))
        emit_scatter(self.rows, 'params', self.path('b.svg'))
        with open(self.path('a.svg'), 'rb') as a, open(self.path('b.svg'), 'rb') as b:
            self.assertEqual(a.read(), b.read())

    def test_highlight_filter(self):
        # combined scores: 2.55, 2.4, 2.25, 1.5, 2.1
        count = emit_scatter(self.rows, 'params', self.path('s.svg'), min_combined=2.3)
        self.assertEqual(count, 2)
        self.assertEqual(len(marker_ids(self.path('s.svg'))), 2)

    def test_failed_rows_without_records_are_skipped(self):
        rows = self.rows + [helper.create_row('x', tasks=(), failed=True, error='boom')]
        self.assertEqual(emit_scatter(rows, 'params', self.path('s.svg')), 5)

    def test_errors(self):
        with self.assertRaises(ReportError):
            emit_scatter([], 'params', self.path('s.svg'))
        with self.assertRaises(ReportError):
            emit_scatter(self.rows, 'colour', self.path('s.svg'))
        with self.assertRaises(ReportError):
            emit_scatter(self.rows, 'params', self.path('s.svg'), min_combined=3.0)
        zero_latency = [helper.create_row(latency=0.0)]
        with self.assertRaises(ReportError):
            emit_scatter(zero_latency, 'latency', self.path('s.svg'), log_x=True)

    def test_emit_all(self):
        settings = ReportSettings(formats=('csv', 'json'), scatter=('params', 'latency'), log_x=('latency',))
        rows = [helper.create_row(latency=0.0)]
        paths = emit_all(rows, self.directory.name, settings)
        # the log-scaled latency plot cannot show zero latencies and is skipped
        self.assertEqual([os.path.basename(p) for p in paths], ['report.csv', 'report.json', 'scatter_params.svg'])
        for path in paths:
            self.assertTrue(os.path.exists(path))
