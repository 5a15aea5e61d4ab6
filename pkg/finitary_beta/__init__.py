# Public entry points; submodules stay importable on their own.

from .prob import Configuration, Pattern, ProbVector
from .free_group import GroupElement, ball, parse_word
from .coding import AdaptiveCode, FixedRadiusCode, expected_code_length
from .automorphism import LocalAutomorphism
from .cocycle import CocycleContext, Transformation
from .beta import beta_closed, beta_limit_exact, beta_limit_mc
from .recovery import distinguish, power_sums, recover_vector

__version__ = "0.1.0"
