class MetricsError(ValueError):
    """Metric inputs that cannot be scored."""
