"""
Detection post-processing commands for the FieldForge CLI
"""

from pathlib import Path

import click

from ...services.fusion import nms, wbf
from ..utils import handle_errors, read_boxes, write_json


@click.command()
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(path_type=Path, dir_okay=False, exists=True))
@click.option("--method", type=click.Choice(["wbf", "nms"]), default="wbf", show_default=True)
@click.option("--iou", type=click.FloatRange(0, 1, min_open=True), default=0.55, show_default=True,
              help="IoU threshold")
@click.option("--source-count", type=click.IntRange(min=1), default=None,
              help="Number of models for WBF score rescaling (default: number of inputs)")
@click.option("--skip", "skip_box_threshold", type=click.FloatRange(0, 1), default=0.0,
              show_default=True, help="WBF: drop boxes scoring below this")
@click.option("--out", type=click.Path(path_type=Path, dir_okay=False), default=None,
              help="Output JSON (default: stdout)")
@handle_errors
def fuse(inputs, method, iou, source_count, skip_box_threshold, out):
    """
    Fuse box predictions

    Each INPUT is a JSON list of ``{"box": [x1, y1, x2, y2], "score": s,
    "label": l}`` objects from one model. WBF fuses across inputs; NMS pools
    them and suppresses overlaps.

    Example:
        fieldforge fuse --method wbf --iou 0.55 model_a.json model_b.json
    """
    box_lists = [read_boxes(p) for p in inputs]
    if method == "wbf":
        fused = wbf(box_lists, iou, source_count=source_count,
                    skip_box_threshold=skip_box_threshold)
    else:
        fused = nms([b for boxes in box_lists for b in boxes], iou)
    write_json([b.to_json() for b in fused], out)
