"""Numerical tolerances and run defaults shared by every module."""

#: |<x|y>| below this counts as orthogonal; also the Gram-identity tolerance.
ORTHO_TOL = 1e-12
#: max |U^dagger U - 1| accepted for a mode unitary.
UNITARY_TOL = 1e-9
#: singular values above this count toward a Schmidt rank.
RANK_TOL = 1e-9
#: detection probabilities above this are in a state's signature support.
SUPPORT_EPS = 1e-9
#: |<x|y>| above 1 - this means two states agree up to a global phase.
PHASE_MATCH_TOL = 1e-9

#: feasibility verdict thresholds on the best residual found.
FEASIBLE_BELOW = 1e-14
INFEASIBLE_ABOVE = 1e-8
#: restart multiplier applied once when the best residual lands between them.
ESCALATION_FACTOR = 10

DEFAULT_SEED = 0xB311
DEFAULT_RESTARTS = 200
DEFAULT_MAX_ITER = 500

SCHEMA = "hyperbell/1"
