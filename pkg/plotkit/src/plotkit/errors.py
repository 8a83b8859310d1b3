class PlotkitError(Exception):
    """Malformed or missing input; the message names the offending path."""
