"""Star-convex polygon encoding, detection and scoring (C++ core)."""

from ._core import (
    Detections,
    FormatError,
    StarPolygon,
    ap_sweep,
    average_precision,
    detect,
    distance_transform,
    encode,
    intersection_area,
    match,
    polygon_area,
    polygon_iou,
    read_labels,
    read_maps,
    render,
    roundtrip,
    toy_image,
    worker_count,
    write_labels,
    write_maps,
)

__all__ = [
    "Detections",
    "FormatError",
    "StarPolygon",
    "ap_sweep",
    "average_precision",
    "detect",
    "distance_transform",
    "encode",
    "intersection_area",
    "match",
    "polygon_area",
    "polygon_iou",
    "read_labels",
    "read_maps",
    "render",
    "roundtrip",
    "toy_image",
    "worker_count",
    "write_labels",
    "write_maps",
]
