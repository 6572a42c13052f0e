"""Cut-and-project Delone sets from geodesics on a genus-2 hyperbolic surface,
with the local-rubber entourage calculus and the Euclidean chaotic Delone
constructions."""

from .chaos import (
    ClosedGeodesic,
    LengthSpectrum,
    approx_by_closed,
    condition_check,
    dalbo_check,
    enumerate_closed,
    length_spectrum,
    tau_sup_estimate,
    translate_match,
)
from .cutproject import ProjectedSet, TubeConfig, cut_project, merge_close_pairs
from .delone import (
    Box,
    Entourage,
    Torus,
    WindowedPointSet,
    check_delone,
    composition_check,
    entourage_member,
    find_periods,
    rubber_proximity,
)
from .euclid import (
    Region,
    VqParams,
    chaotify,
    glue_extend,
    greedy_separated_complete,
    inner_extend,
    vq_construct,
    vq_member,
    w_member,
)
from .hyperbolic import HyperbolicPoint, Isometry, OrientedGeodesic, UnitTangent
from .policy import NumericPolicy
from .surface import SurfaceGroup, ball_orbit, random_geodesic, standard_surface, tube_scan

__version__ = "0.1.0"
