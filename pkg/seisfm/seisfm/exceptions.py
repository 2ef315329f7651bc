from django.core.exceptions import ImproperlyConfigured


class ConfigurationError(ImproperlyConfigured):
    """An experiment, model or strategy configuration that cannot be built."""
