from .arguments import *
from .experiment import *
