"""The whole experiment: data, pre-training, training, scoring and reports."""
import logging

from django.core.management.base import CommandError

from benchmarks.management.base import ExperimentCommand
from benchmarks.models import ExperimentRun
from benchmarks.reports import emit_all
from benchmarks.runner import run_experiment


logger = logging.getLogger(__name__)


class Command(ExperimentCommand):
    help = "Runs the experiment grid, stores the rows and writes the report files"

    def add_experiment_arguments(self, parser):
        parser.add_argument('--no-models', action='store_true', help="Do not keep trained model checkpoints")

    def handle_experiment(self, config, /, **options):
        with open(config.path('experiment.cfg'), 'w') as f:
            f.write(config.as_text())
        run = ExperimentRun.objects.create(name=config.name, seed=config.seed, output_dir=config.output_dir,
                                           config_text=config.as_text())
        rows = run_experiment(config, save_models=not options['no_models'])
        run.record_rows(rows)
        for path in emit_all(rows, config.output_dir, config.report):
            self.stdout.write("Wrote %s" % path)
        logger.info("Stored run %d (%s): %d rows, %d failed", run.pk, config.name, len(rows), run.failed_rows)
        if run.failed_rows:
            raise CommandError("%d of %d grid rows failed; see the log and report.json" % (run.failed_rows, len(rows)))
