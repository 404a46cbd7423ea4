from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any


def add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("job", help="Path to the JSON job file")
    parser.add_argument("--out", default=None, help="Write the artifact here instead of stdout")


def write_text(text: str, args: argparse.Namespace) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def emit(document: Any, args: argparse.Namespace) -> None:
    """JSON artifact with a fixed key order (insertion order) and a trailing newline."""
    write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", args)
