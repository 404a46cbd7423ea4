"""Subcommands. Each module exposes ``register(subparsers)``."""
