from __future__ import annotations

import importlib
import pkgutil
from types import ModuleType
from typing import Callable, List, Optional

from .log_utils import get_logger

logger = get_logger(__name__)


def autodiscover_and_register(package: str, subparsers) -> List[str]:
    """Import all submodules in `package` and call their `register(subparsers)` if present.

    Command modules stay self-contained; adding a file under the package adds a
    subcommand. Returns the names of the modules that registered.
    """
    pkg = importlib.import_module(package)
    if not hasattr(pkg, "__path__"):
        logger.warning("package has no __path__ for discovery", code="Registry", package=package)
        return []

    registered: List[str] = []
    for _finder, name, _ispkg in sorted(pkgutil.walk_packages(pkg.__path__, pkg.__name__ + "."), key=lambda m: m[1]):
        mod = importlib.import_module(name)
        if _register_module(mod, subparsers):
            registered.append(name)
    return registered


def _register_module(mod: ModuleType, subparsers) -> bool:
    register: Optional[Callable] = getattr(mod, "register", None)
    if callable(register):
        register(subparsers)
        logger.debug("registered command module", code="Registry", module=mod.__name__)
        return True
    return False
