"""Shared plumbing of the experiment management commands."""
import json
import logging
import os

from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError

from benchmarks.config import load_experiment


logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    """A command driven by an experiment file plus --seed/--out overrides.

    Subclasses implement handle_experiment(config, **options). Library
    errors surface as CommandError so the process exits non-zero.
    """

    def add_arguments(self, parser):
        parser.add_argument('--config', help="Experiment file of key=value lines")
        parser.add_argument('--seed', type=int, help="Overrides the experiment seed")
        parser.add_argument('--out', help="Overrides the output directory")
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    def load_config(self, options):
        return load_experiment(options['config'], options['seed'], options['out'])

    def handle(self, *args, **options):
        try:
            config = self.load_config(options)
            os.makedirs(config.output_dir, exist_ok=True)
            self.handle_experiment(config, **options)
        except CommandError:
            raise
        except (ImproperlyConfigured, ValueError, RuntimeError, OSError) as e:
            logger.exception("%s failed", self.__class__.__module__.rsplit('.', 1)[-1])
            raise CommandError("%s: %s" % (type(e).__name__, e))

    def handle_experiment(self, config, /, **options):
        raise NotImplementedError

    def write_json(self, path, payload):
        with open(path, 'w') as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write('\n')
        self.stdout.write("Wrote %s" % path)
