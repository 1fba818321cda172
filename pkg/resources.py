"""
Resource path utilities for mpstab

Finds packaged data files (the example tensors under data/tensors) both in
a source checkout and in a PyInstaller bundle.
"""

import os
import sys
from typing import List

TENSOR_DIR = os.path.join('data', 'tensors')


def is_frozen() -> bool:
    """Check if running as PyInstaller frozen executable."""
    return getattr(sys, 'frozen', False) and hasattr(sys, '_MEIPASS')


def get_resource_path(relative_path: str) -> str:
    """
    Get absolute path to a resource file.

    Args:
        relative_path: Path relative to the application root

    Returns:
        Absolute path to the resource
    """
    if is_frozen():
        base_path = sys._MEIPASS
    else:
        base_path = os.path.dirname(os.path.abspath(__file__))

    return os.path.join(base_path, relative_path)


def get_tensor_path(name: str) -> str:
    """Path of a packaged tensor file; ``name`` may omit the .json suffix"""
    if not name.endswith('.json'):
        name = name + '.json'
    return get_resource_path(os.path.join(TENSOR_DIR, name))


def list_packaged_tensors() -> List[str]:
    """Names (without suffix) of the packaged tensor files"""
    directory = get_resource_path(TENSOR_DIR)
    if not os.path.isdir(directory):
        return []
    return sorted(f[:-5] for f in os.listdir(directory) if f.endswith('.json'))


def resolve_tensor_argument(arg: str) -> str:
    """
    A command-line tensor argument is either a file path or the name of a
    packaged tensor (e.g. "w_state").
    """
    if os.path.exists(arg):
        return arg
    packaged = get_tensor_path(arg)
    if os.path.exists(packaged):
        return packaged
    return arg
