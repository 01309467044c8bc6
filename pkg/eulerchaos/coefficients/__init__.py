from .fields import *
from .smoothing import Mollifier, mollify, mollify_field, cutoff, chi
from .density import gaussian_density, ball_volume
from .catalog import load_model, load_kernel, load_interaction, catalog_names
