from dotenv import load_dotenv

from .controller import app

load_dotenv()

__all__ = ['app']
