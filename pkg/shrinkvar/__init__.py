__version__ = '0.1'

from . import core
from .core import *
