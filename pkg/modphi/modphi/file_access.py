"""
file_access
"""

import hashlib
import logging
import pathlib
import tempfile
import typing


@typing.overload
def write_to_temp_file(content: bytes, **kw_args) -> pathlib.Path: ...


@typing.overload
def write_to_temp_file(text: str, **kw_args) -> pathlib.Path: ...


def write_to_temp_file(
    content: str | bytes, prefix: str = "modphi-", suffix: str = ""
) -> pathlib.Path:
    """Creates a named temporary file that isn't deleted and writes content to it.

    Args:
        content (str|bytes): String or bytes be written to the file
        prefix (str, optional): Prefix of the file name. Defaults to "modphi-".
        suffix (str, optional): Suffix of the file name, e.g. ".toml". Defaults to "".

    Raises:
        ValueError: If the content has an unsupported type

    Returns:
        pathlib.Path: Path object of the temporary file created

    Example: Write a model file to a temporary file

    >>> p = write_to_temp_file("law = 'poisson'", suffix=".toml")
    >>> p.suffix
    '.toml'
    >>> print(p.read_text())
    law = 'poisson'

    Example: Write unsupported content to temp file

    >>> p = write_to_temp_file(123)
    Traceback (most recent call last):
    ValueError: unsupported content type to write to temporary file
    """
    with tempfile.NamedTemporaryFile(
        delete=False, prefix=prefix, suffix=suffix
    ) as f:
        logging.debug(f"Created temporary file: {f.name}")
        p = pathlib.Path(f.name)
        if isinstance(content, str):
            p.write_text(content)
        elif isinstance(content, bytes):
            p.write_bytes(content)
        else:
            raise ValueError("unsupported content type to write to temporary file")
        return p


def digest(path: str | pathlib.Path) -> str:
    """Returns the SHA-256 hex digest of a file's bytes.

    Used to compare two runs of the same configuration byte for byte.

    Example:

    >>> a = write_to_temp_file("same")
    >>> b = write_to_temp_file(b"same")
    >>> digest(a) == digest(b)
    True
    """
    return hashlib.sha256(pathlib.Path(path).read_bytes()).hexdigest()
