"""Regenerates the report files of a stored run."""
from django.core.management.base import CommandError

from benchmarks.config import build_experiment, merge_values, parse_config_text
from benchmarks.management.base import ExperimentCommand
from benchmarks.models import ExperimentRun
from benchmarks.reports import emit_all


class Command(ExperimentCommand):
    help = "Writes CSV/JSON tables and SVG scatter plots of a stored run (default: the latest)"

    def add_experiment_arguments(self, parser):
        parser.add_argument('--run', type=int, help="ExperimentRun id")

    def load_config(self, options):
        if options['run'] is not None:
            try:
                self.run = ExperimentRun.objects.get(pk=options['run'])
            except ExperimentRun.DoesNotExist:
                raise CommandError("No stored run with id %d" % options['run'])
        else:
            self.run = ExperimentRun.objects.order_by('-created', '-id').first()
            if self.run is None:
                raise CommandError("No stored runs; use `run` first")
        if options['config']:
            return super().load_config(options)
        values = parse_config_text(self.run.config_text, 'run %d' % self.run.pk)
        return build_experiment(merge_values(values, options['seed'], options['out']))

    def handle_experiment(self, config, /, **options):
        rows = self.run.report_rows()
        if not rows:
            raise CommandError("Run %d has no report rows" % self.run.pk)
        for path in emit_all(rows, config.output_dir, config.report):
            self.stdout.write("Wrote %s" % path)
