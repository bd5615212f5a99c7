class ChatEAError(Exception):
	'''
	Base class of every error raised by chatea.
	'''


class ConfigError(ChatEAError):
	pass


class KGParseError(ChatEAError):
	'''
	A dataset file line could not be parsed.
	'''
	def __init__(self, path: str, line_no: int, message: str):
		super().__init__(f'{path}:{line_no}: {message}')
		self.path = path
		self.line_no = line_no


class ReferentialIntegrityError(ChatEAError):
	pass


class AnchorError(ChatEAError):
	pass


class WhiteningError(ChatEAError):
	pass


class TrainingDivergedError(ChatEAError):
	pass


class ReplyParseError(ChatEAError):
	'''
	A model reply did not follow the expected output format.
	The raw reply is kept for logging and transcripts.
	'''
	def __init__(self, message: str, raw: str):
		super().__init__(message)
		self.raw = raw


class BackendError(ChatEAError):
	pass


class TransportError(BackendError):
	'''
	The chat endpoint could not be reached after all retries.
	'''


class BackendHTTPError(BackendError):
	def __init__(self, status_code: int, body: str):
		super().__init__(f'chat endpoint returned {status_code}: {body}')
		self.status_code = status_code
		self.body = body


class TranscriptExhaustedError(BackendError):
	pass


class OracleLookupError(BackendError):
	pass


class ResultsSchemaError(ChatEAError):
	pass
