from .logging import *
from .pprint import *
from .report import *
from .results import *
