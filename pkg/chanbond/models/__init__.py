# Models module
from .trace import *
from .simulation import *
from .analysis import *
from .synth import *
