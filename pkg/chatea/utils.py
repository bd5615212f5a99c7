from collections.abc import Callable
from functools import wraps
import hashlib
from logging import error as log_error
from pathlib import Path

import click
import typer

from .errors import AnchorError, ConfigError, KGParseError, ResultsSchemaError

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_RUNTIME_FAILURE = 2

USER_ERRORS = (ConfigError, ResultsSchemaError, KGParseError, AnchorError, FileNotFoundError, click.UsageError)


def _file_digest(f, digest: str):
	# hashlib.file_digest only exists on Python >= 3.11
	if hasattr(hashlib, 'file_digest'):
		return hashlib.file_digest(f, digest)
	h = hashlib.new(digest)
	for chunk in iter(lambda: f.read(2**18), b''):
		h.update(chunk)
	return h


def file_digest(path: str | Path) -> str:
	with open(path, 'rb') as f:
		return _file_digest(f, 'sha256').hexdigest()


def exit_guard(func: Callable):
	'''
	Decorator mapping failures of a command to the exit codes:
	1 for user errors (config, input files, schema), 2 for anything else.
	'''
	@wraps(func)
	def wrapper(*args, **kwargs):
		try:
			return func(*args, **kwargs)
		except typer.Exit:
			raise
		except USER_ERRORS as e:
			log_error(f'Error: {e}')
			raise typer.Exit(EXIT_USER_ERROR) from e
		except Exception as e:
			log_error(f'Error: {func.__name__} failed: {e}', exc_info=e)
			raise typer.Exit(EXIT_RUNTIME_FAILURE) from e

	return wrapper
