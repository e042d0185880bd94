"""
File utility functions
"""
import glob
import os
import re

from config.settings import INSTANCE_EXTENSION


def clean_filename(filename):
    """Clean a label for safe file system usage"""
    name = re.sub(r"[^\w\s.-]", "", filename)
    name = re.sub(r'[-\s]+', '-', name)

    return name.strip('-').lower()


def ensure_directory(path):
    """Ensure directory exists"""
    os.makedirs(path, exist_ok=True)
    return path


def get_base_filename(file_path):
    """Get base filename without extension"""
    return os.path.splitext(os.path.basename(file_path))[0]


def is_instance_file(file_path):
    """Check if file uses the canonical instance extension"""
    return os.path.splitext(file_path)[1].lower() == INSTANCE_EXTENSION


def find_instance_files(paths):
    """Expand files, directories and glob patterns into a sorted list of instance files"""
    found = []
    for path in paths:
        if os.path.isdir(path):
            found.extend(glob.glob(os.path.join(path, f"*{INSTANCE_EXTENSION}")))
        elif any(ch in path for ch in "*?["):
            found.extend(p for p in glob.glob(path) if is_instance_file(p))
        else:
            found.append(path)
    return sorted(set(found))


def instance_filename(label):
    """File name for an instance label"""
    return f"{clean_filename(label)}{INSTANCE_EXTENSION}"
