"""Loss-tolerant, measurement-device-independent steering game toolkit."""
from .bounds import BoundResult, PreparationReport, d_nk, d_table, r_factor, steering_bound
from .errors import QRSError
from .game import (
    CheatStrategy,
    Exact,
    FixedState,
    Reported,
    ScoreSpec,
    SearchGrid,
    Visibility,
    cheat_score,
    cheat_search,
    exact_honest_score,
)
from .settings import DirectionSet, builtin_directions, load_directions

__version__ = "0.1.0"
