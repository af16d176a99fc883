"""Exact wave-front tracking for ``u_t + w_t + u_x = 0`` with ``w`` the play
hysteresis output of ``u``."""
from .errors import (DegenerateData, DegenerateJump, DomainError, HystError, InfeasibleData,
                     InfeasibleInitialState, InfeasibleState, MismatchedBreakpoints, NonAdmissiblePair,
                     SpecParseError, StaleEvent, UnboundedSupport, WindowMismatch)
from .play import (HysteresisStrip, PiecewiseConstantSignal, PiecewiseLinearSignal, PlayState, play_jump,
                   play_oracle, play_pc, play_piecewise_linear, verify_play_variational)
from .problem import ProblemSpec, coarsen_bv, load_spec, parse_spec, serialize_spec
from .profile import PiecewiseConstantProfile, l1_distance
from .riemann import (HystFront, HystWaveFan, PiecewiseLinearFlux, RiemannData, concave_majorant,
                      convex_minorant, effective_flux, solve_riemann_hyst, solve_riemann_plf)
from .tracking import Trajectory, delta_floor, event_budget, run, sample
from .verification import (FrontClass, TestBump, classify_front, entropy_grid_check, hysteresis_energy_check,
                           spacetime_l1_distance, verify_trajectory, weak_residual_geometric,
                           weak_residual_quadrature)

__version__ = "0.1.0"
