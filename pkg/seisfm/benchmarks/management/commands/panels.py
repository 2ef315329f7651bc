"""Qualitative PGM panels of held-out samples."""
import os

from django.core.management.base import CommandError

from benchmarks.management.base import ExperimentCommand
from benchmarks.panels import emit_panels
from benchmarks.runner import Experiment, held_out_samples
from seisdata import TASKS
from training.downstream import STRATEGIES


class Command(ExperimentCommand):
    help = "Draws input, prediction and residual panels for held-out samples of one task"

    def add_experiment_arguments(self, parser):
        parser.add_argument('--task', required=True, choices=TASKS)
        parser.add_argument('--encoder', help="Encoder of the model (default: the first configured)")
        parser.add_argument('--strategy', choices=STRATEGIES, help="Strategy of the model (default: the first)")
        parser.add_argument('--model', help="Model checkpoint (default: the one `train` wrote)")
        parser.add_argument('--count', type=int, default=2, help="Number of held-out samples")

    def handle_experiment(self, config, /, **options):
        task = options['task']
        name = options['encoder'] or config.encoders[0][0]
        strategy = options['strategy'] or config.strategies[0]
        label, decoder_config = config.decoders[0]
        experiment = Experiment(config)
        path = options['model']
        if not path:
            row_name = '%s+%s' % (name, label) if len(config.decoders) > 1 else name
            size = config.dataset_sizes[0] if config.dataset_sizes else None
            path = experiment.model_path(row_name, strategy, task, size)
        if not os.path.exists(path):
            raise CommandError("No model checkpoint at %s" % path)

        model = experiment.load_model(name, decoder_config, task, path)
        samples = held_out_samples(config, task, options['count'])
        paths = emit_panels(model.predict, samples, task, config.path('panels', task))
        self.stdout.write("Wrote %d panels to %s" % (len(paths), config.path('panels', task)))
