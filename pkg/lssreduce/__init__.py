"""
lssreduce: moment-matching model reduction for continuous-time linear
switched systems.
"""

from .errors import (CoverageError, InfeasibleError, InvalidInputError, LssError, ModelValidationError,
                     RankConditionError, SizeLimitError)
from .model import Lss, load_model, markov_parameter, markov_parameters_up_to, minimize, save_model
from .moment import ReductionReport, check_partial_realization, reduce
from .nice import check_selection, match_sequence, reduce_alpha, reduce_alphabeta, reduce_beta
from .simulate import SwitchingSequence, bfr, random_switching, simulate

__version__ = "1.0.0"
