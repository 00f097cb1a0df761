"""Hilbert geometry of planar convex bodies: distances, midpoints, medians,
and constructive witnesses that medians fail to concur off ellipses."""

from .bodies import Chord, ConvexBody, EllipseBody, Polygon, boundary_intersections, chord_through, contains, inflate
from .errors import HilbertError, NumericalError, ValidationError
from .geometry import ChordFrame, Line, Point, chord_coordinate, cross_ratio, intersect_lines, line_through
from .john import JohnResult, contact_points, max_area_inscribed_ellipse, steiner_inellipse
from .metric import MedianReport, Triangle, distance, median_report, midpoint, midpoint_line_coords
from .witness import (
    FivePoints,
    WitnessReport,
    construct_triangle,
    defect_scan,
    pick_u,
    refine,
    select_five,
    witness,
    working_ellipse,
)

__version__ = "0.1.0"

__all__ = [
    "Chord", "ChordFrame", "ConvexBody", "EllipseBody", "FivePoints", "HilbertError", "JohnResult",
    "Line", "MedianReport", "NumericalError", "Point", "Polygon", "Triangle", "ValidationError",
    "WitnessReport", "boundary_intersections", "chord_coordinate", "chord_through", "construct_triangle",
    "contact_points", "contains", "cross_ratio", "defect_scan", "distance", "inflate", "intersect_lines",
    "line_through", "max_area_inscribed_ellipse", "median_report", "midpoint", "midpoint_line_coords",
    "pick_u", "refine", "select_five", "steiner_inellipse", "witness", "working_ellipse",
]
