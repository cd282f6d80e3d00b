"""
Shared file helpers.
"""
import hashlib
import os
import tempfile
from contextlib import contextmanager


@contextmanager
def atomic_open(path, encoding: str = 'utf-8'):
    """
    Open a text file for writing that only appears at ``path`` once complete.

    Content goes to a temporary file in the same directory, which replaces
    the target on success and is removed on failure.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        with os.fdopen(fd, 'w', encoding=encoding, newline='\n') as fh:
            yield fh
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def atomic_write_text(path, text: str):
    with atomic_open(path) as fh:
        fh.write(text)


def file_digest(path) -> str:
    """SHA-256 hex digest of a file."""
    digest = hashlib.sha256()
    with open(path, 'rb') as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()
