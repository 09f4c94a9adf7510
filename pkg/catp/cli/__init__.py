"""Command-line surface for CATP."""
