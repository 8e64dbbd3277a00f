"""
Evaluation commands for the FieldForge CLI

- ``lr-dump``: the learning-rate curve as ``epoch,lr`` CSV
- ``evaluate``: classifier report from truth/prediction pairs
- ``simulate``: the identifier-then-classifier pipeline over saved mosaics
"""

import csv
from pathlib import Path

import click

from ...config import settings
from ...models.boxes import TtaKind
from ...models.corpus import PlantClass
from ...models.metrics import SupportMode
from ...models.schedule import LrSchedule
from ...services.classifiers import baseline_classifier, oracle_classifier, truth_from_samples
from ...services.corpus import ImageStore, attach_store, read_label_table
from ...services.identifiers import oracle_identifier, train_tile_identifier
from ...services.metrics import confusion, evaluation_report, match_detections
from ...services.mosaic import list_mosaic_pairs, parse_annotations, read_mosaic
from ...services.pipeline import catalog_of, correlated_oracles, run_pipeline
from ...services.schedule import lr_series
from ..utils import (
    build_spec,
    grid_options,
    handle_errors,
    images_option,
    images_path,
    labels_option,
    labels_path,
    print_info,
    read_boxes,
    resolve_seed,
    seed_option,
    write_json,
)


@click.command("lr-dump")
@click.option("--epochs", type=click.IntRange(min=0), required=True)
@click.option("--lr-start", type=float, default=1e-5, show_default=True)
@click.option("--lr-max", type=float, default=1e-3, show_default=True)
@click.option("--lr-min", type=float, default=1e-5, show_default=True)
@click.option("--ramp", "ramp_epochs", type=click.IntRange(min=0), default=5, show_default=True)
@click.option("--sustain", "sustain_epochs", type=click.IntRange(min=0), default=0,
              show_default=True)
@click.option("--decay", type=float, default=0.8, show_default=True)
@click.option("--out", type=click.Path(path_type=Path, dir_okay=False), default=None,
              help="Output CSV (default: stdout)")
@handle_errors
def lr_dump(epochs, lr_start, lr_max, lr_min, ramp_epochs, sustain_epochs, decay, out):
    """Print the learning-rate schedule as epoch,lr CSV"""
    schedule = LrSchedule(lr_start=lr_start, lr_max=lr_max, lr_min=lr_min,
                          ramp_epochs=ramp_epochs, sustain_epochs=sustain_epochs, decay=decay)
    lines = ["epoch,lr"] + [f"{epoch},{lr!r}" for epoch, lr in lr_series(epochs, schedule)]
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")


@click.command()
@click.argument("predictions", type=click.Path(path_type=Path, dir_okay=False, exists=True))
@click.option("--support", type=click.Choice([m.value for m in SupportMode]),
              default=SupportMode.PREDICTED.value, show_default=True,
              help="Count support by predicted or by actual class")
@click.option("--identifier-acc", type=click.FloatRange(0, 1), default=None,
              help="Identifier accuracy, to add composed pipeline bounds")
@click.option("--detections", type=click.Path(path_type=Path, dir_okay=False, exists=True),
              default=None, help="Identifier boxes as a JSON list (needs --annotations)")
@click.option("--annotations", type=click.Path(path_type=Path, dir_okay=False, exists=True),
              default=None, help="Mosaic annotation CSV the detections are matched against")
@click.option("--match-iou", type=click.FloatRange(0, 1, min_open=True), default=None,
              help="Detection-to-tile IoU threshold (default: settings.identifier_iou)")
@click.option("--out", type=click.Path(path_type=Path, dir_okay=False), default=None)
@handle_errors
def evaluate(predictions, support, identifier_acc, detections, annotations, match_iou, out):
    """
    Classifier report from a CSV with ``truth`` and ``predicted`` columns

    With ``--detections`` and ``--annotations`` the report adds identifier
    confidences, and the identifier recall feeds the bounds unless
    ``--identifier-acc`` is given.

    Example:
        fieldforge evaluate preds.csv --detections boxes.json --annotations train_0.csv
    """
    if (detections is None) != (annotations is None):
        raise click.UsageError("--detections and --annotations go together")
    with open(predictions, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or not {"truth", "predicted"} <= set(reader.fieldnames):
            raise ValueError(f"{predictions}: expected 'truth' and 'predicted' columns")
        rows = list(reader)
    cm = confusion([r["predicted"].strip() for r in rows], [r["truth"].strip() for r in rows],
                   PlantClass.ordered())
    matching = None
    if detections is not None:
        truth = parse_annotations(annotations.read_text(encoding="utf-8"))
        matching = match_detections(read_boxes(detections), truth,
                                    match_iou or settings.identifier_iou)
    write_json(evaluation_report(cm, SupportMode(support), matching=matching,
                                 identifier_acc=identifier_acc), out)


@click.command()
@click.option("--mosaics", "mosaics_dir", type=click.Path(path_type=Path, file_okay=False,
                                                          exists=True),
              required=True, help="Directory of mosaic PNG+CSV pairs")
@labels_option
@images_option
@click.option("--identifier", type=click.Choice(["oracle", "tile"]), default="oracle",
              show_default=True)
@click.option("--classifier", type=click.Choice(["oracle", "baseline"]), default="oracle",
              show_default=True)
@click.option("--miss-rate", type=click.FloatRange(0, 1), default=0.245, show_default=True)
@click.option("--false-alarm-rate", type=click.FloatRange(0, 1), default=0.0, show_default=True)
@click.option("--error-rate", type=click.FloatRange(0, 1), default=0.037, show_default=True)
@click.option("--correlated", is_flag=True,
              help="Oracle errors share one hardness draw per tile (nested errors)")
@click.option("--tta", multiple=True, type=click.Choice([k.value for k in TtaKind]),
              help="Run the identifier through TTA with these transforms (repeatable)")
@click.option("--iou", type=click.FloatRange(0, 1, min_open=True), default=None,
              help="Box-to-tile IoU threshold (default: settings.identifier_iou)")
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--diagnoses", is_flag=True, help="Include per-tile rows in the report")
@seed_option
@grid_options
@click.option("--out", type=click.Path(path_type=Path, dir_okay=False), default=None)
@handle_errors
def simulate(mosaics_dir, labels, images, identifier, classifier, miss_rate, false_alarm_rate,
             error_rate, correlated, tta, iou, workers, diagnoses, seed, grid, tile, out):
    """
    Run the two-step pipeline over saved mosaics and report accuracy

    Example:
        fieldforge simulate --mosaics data/mosaics --miss-rate 0.245 --error-rate 0.037
    """
    seed = resolve_seed(seed)
    spec = build_spec(grid, tile)
    pairs = list_mosaic_pairs(mosaics_dir)
    if not pairs:
        raise click.BadParameter(f"no mosaic PNG+CSV pairs in {mosaics_dir}",
                                 param_hint="--mosaics")
    fields = [read_mosaic(png, csv_path, spec) for png, csv_path in pairs]
    samples = attach_store(read_label_table(labels_path(labels)), ImageStore(images_path(images)))
    truth = truth_from_samples(samples)

    if correlated:
        if identifier != "oracle" or classifier != "oracle":
            raise click.UsageError("--correlated needs the oracle identifier and classifier")
        id_model, cls_model = correlated_oracles(miss_rate, error_rate, seed, truth)
    else:
        id_model = (oracle_identifier(miss_rate, false_alarm_rate, seed) if identifier == "oracle"
                    else train_tile_identifier(fields))
        cls_model = (oracle_classifier(error_rate, seed, truth) if classifier == "oracle"
                     else baseline_classifier(samples))

    if tta and TtaKind.IDENTITY.value not in tta:
        tta = (TtaKind.IDENTITY.value, *tta)
    print_info(f"Simulating {len(fields)} mosaic(s)")
    report = run_pipeline(id_model, cls_model, fields, catalog_of(samples),
                          iou_threshold=iou or settings.identifier_iou, tta=list(tta) or None,
                          wbf_iou=settings.wbf_iou, max_workers=workers or settings.max_workers)
    write_json(report.model_dump(mode="json") if diagnoses else report.summary(), out)
