from contextlib import contextmanager
import os
import sys


@contextmanager
def working_directory(path):
    """Run the body inside `path`, creating it if needed."""
    old_path = os.getcwd()
    os.makedirs(path, exist_ok=True)
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old_path)


@contextmanager
def output_stream(path=None):
    """A text stream writing to `path`, or stdout when `path` is None.

    Files are opened with newline='' so CSV line endings are written
    as given."""
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", newline="") as f:
        yield f
