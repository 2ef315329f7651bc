from .base import *

DEBUG = True

for package in PACKAGES:
    LOGGING['loggers'][package]['level'] = 'DEBUG'
LOGGING['handlers']['console_seisfm']['level'] = 'DEBUG'

# Small enough to finish a full grid in minutes
SEISFM_EXPERIMENT_DEFAULTS = dict(
    SEISFM_EXPERIMENT_DEFAULTS,
    **{
        'data.demultiple.count': '200',
        'data.interpolation.count': '200',
        'data.denoise.count': '200',
        'pretrain.count': '50',
    }
)
