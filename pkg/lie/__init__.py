from . import utils
from . import rootsystem
from . import kostant
from . import apposition
from . import coxplane
