"""Cops and robber on metric graphs: exact discrete solver, wedge and hat
constructions, a game engine and the robber strategies that live on them."""
from ._accel import backend
from .constructions import (BASE, CONE, CYLINDER, TOP, HatChart, HatSpace, Skeleton, WedgeSpace,
                            attach_hat, build_cylinder, build_hat, build_top, counterexample_one,
                            expand_subspace, required_height, rescale, skeleton_of, subdivide)
from .discrete import (DiscreteGraph, StrategyTable, cop_number_discrete, is_dismantlable,
                       k_copwin, solve)
from .game import Game, GameState, GameTrace, Schedule, game_value, new_game
from .metric import EdgePoint, MetricGraph, Path, Vertex, build_metric_graph
from .strategies import (GreedyCops, IdleRobber, LiftedCops, PretendRobber, PretendState,
                         RandomCops, RandomRobber, ShadowRobber, accomplice_update,
                         pretend_robber_strategy, pretend_update, shadow_robber_strategy)

__version__ = "0.1.0"
