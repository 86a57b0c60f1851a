"""Block-structured semidefinite programming engine."""
from .maps import Compose, Dense, Embed, Identity, LinkWith, Outer, PartialTrace, SubBlock
from .problem import Block, Family, SdpProblem, SdpSolution, Settings, Space, check_solution
from .solver import solve_sdp
from .realify import complexify_matrix, realify, realify_matrix, solve_via_realification
from .probe import ProbeResult, feasibility_probe
