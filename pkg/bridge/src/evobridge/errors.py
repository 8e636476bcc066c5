class BridgeError(Exception):
    """Any bridge failure the CLI should report as a data error (exit 2)."""
