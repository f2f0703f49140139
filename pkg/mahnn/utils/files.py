import hashlib
import os
from pathlib import Path


def write_atomic(path, data):
    """Writes ``data`` next to ``path`` and renames it into place"""
    path = Path(path)
    temporary = path.with_name(path.name + '.tmp')
    if isinstance(data, bytes):
        temporary.write_bytes(data)
    else:
        with open(temporary, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(data)
    os.replace(temporary, path)
    return path


def sha256sum(path, chunk_size=1 << 16):
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()
