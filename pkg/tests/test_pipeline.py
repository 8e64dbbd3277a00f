import math

import numpy as np
import pytest

from fieldforge.exceptions import ModelInvocationError, TrainingError
from fieldforge.models.boxes import ScoredBox
from fieldforge.models.corpus import PlantClass
from fieldforge.models.mosaic import MosaicAnnotation, MosaicItem, MosaicSpec
from fieldforge.services.classifiers import (
    OracleClassifier,
    keyed_uniforms,
    baseline_classifier,
    truth_from_samples,
)
from fieldforge.services.corpus import read_label_table
from fieldforge.services.identifiers import OracleIdentifier
from fieldforge.services.mosaic import cell_bbox, generate_mosaic, mosaic_seed
from fieldforge.services.pipeline import (
    catalog_of,
    correlated_oracles,
    crop_candidates,
    run_pipeline,
)

from .conftest import sample

SICK = [c for c in PlantClass if c.is_sick]


def box(x1, y1, x2, y2, score=0.9):
    return ScoredBox(corners=(x1, y1, x2, y2), score=score, label=1)


def blank_field(spec, ids):
    """Mosaic with black pixels and one annotation per cell, ``ids`` in row-major order."""
    annotations = [MosaicAnnotation(id=image_id, bbox=cell_bbox(row, col, spec), sick=1)
                   for (row, col), image_id in zip(spec.cells(), ids)]
    image = np.zeros((spec.height_px, spec.width_px, 3), dtype=np.uint8)
    return MosaicItem(image=image, annotations=annotations, spec=spec)


@pytest.fixture
def sick_pool():
    return [sample(f"{c.value}_{k}.png", c) for c in SICK for k in range(3)]


def sick_fields(pool, count, grid=5):
    spec = MosaicSpec.from_grid(grid, grid, 8, 6, soil_probability_override=0.0)
    fields = []
    for i in range(count):
        picks = np.random.default_rng(mosaic_seed(11, i)).integers(0, len(pool), spec.cell_count)
        fields.append(blank_field(spec, [pool[k].image_id for k in picks]))
    return fields


@pytest.fixture
def fields(hf_pool, soil_texture, small_spec):
    return [generate_mosaic(hf_pool, soil_texture, small_spec.model_copy(update={"rng_seed": s}))
            for s in range(4)]


@pytest.fixture
def reference_field():
    spec = MosaicSpec()
    annotations = [
        MosaicAnnotation(id="Train_0.jpg", bbox=(0, 0, 64, 43), sick=0),
        MosaicAnnotation(id="Train_1609.jpg", bbox=(64, 0, 64, 43), sick=1),
    ]
    image = np.zeros((spec.height_px, spec.width_px, 3), dtype=np.uint8)
    return MosaicItem(image=image, annotations=annotations, spec=spec)


def test_crop_resolves_box_to_source_image(reference_field):
    crops = crop_candidates(reference_field, [box(64, 0, 128, 43)], 0.5)
    assert [image_id for _, image_id in crops.resolved] == ["Train_1609.jpg"]
    assert crops.resolved[0][0].bbox == (64, 0, 64, 43)
    assert crops.unresolvable == []


def test_crop_on_soil_is_unresolvable(reference_field):
    soil = box(128, 0, 192, 43)
    crops = crop_candidates(reference_field, [soil], 0.5)
    assert crops.resolved == [] and crops.unresolvable == [soil]


def test_crop_far_from_any_cell_is_unresolvable(reference_field):
    sliver = box(60, 0, 70, 43)
    assert crop_candidates(reference_field, [sliver], 0.5).unresolvable == [sliver]


def test_crop_tie_goes_to_first_cell(reference_field):
    crops = crop_candidates(reference_field, [box(0, 0, 128, 43)], 0.5)
    assert [image_id for _, image_id in crops.resolved] == ["Train_0.jpg"]


def test_crop_lists_each_tile_once(reference_field):
    crops = crop_candidates(reference_field, [box(64, 0, 128, 43), box(65, 1, 128, 43, 0.4)], 0.5)
    assert len(crops.resolved) == 1


def test_crop_rejects_bad_threshold(reference_field):
    with pytest.raises(ValueError):
        crop_candidates(reference_field, [], 0.0)


def test_perfect_models_diagnose_every_sick_tile(fields, hf_pool):
    report = run_pipeline(OracleIdentifier(0.0, 0.0, 1),
                          OracleClassifier(truth_from_samples(hf_pool), 0.0, 1),
                          fields, catalog_of(hf_pool))
    assert report.mosaics == 4
    assert report.sick_tiles == sum(len(f.sick_annotations()) for f in fields) > 0
    assert report.identifier_accuracy == report.end_to_end_accuracy == 1.0
    assert report.classifier_accuracy == 1.0
    assert report.unresolvable_boxes == 0
    assert report.bounds.lower_bound == 1.0
    assert len(report.diagnoses) == sum(len(f.annotations) for f in fields)


def test_false_alarms_reach_the_classifier(fields, hf_pool):
    report = run_pipeline(OracleIdentifier(0.0, 1.0, 1),
                          OracleClassifier(truth_from_samples(hf_pool), 0.0, 1),
                          fields, catalog_of(hf_pool))
    assert all(d.identified for d in report.diagnoses)
    assert report.unresolvable_boxes == sum(f.soil_count for f in fields)
    assert report.end_to_end_accuracy == 1.0


def test_perfect_classifier_passes_identifier_accuracy_through(sick_pool):
    fields = sick_fields(sick_pool, 20)
    report = run_pipeline(OracleIdentifier(0.245, 0.0, 2),
                          OracleClassifier(truth_from_samples(sick_pool), 0.0, 2),
                          fields, catalog_of(sick_pool))
    assert report.end_to_end_accuracy == report.identifier_accuracy < 1.0
    cm = np.array(report.classifier_confusion.counts)
    assert cm.sum() == np.trace(cm)


def test_correlated_errors_hit_the_upper_bound(sick_pool):
    fields = sick_fields(sick_pool, 40)
    identifier, classifier = correlated_oracles(0.245, 0.037, 3, truth_from_samples(sick_pool))
    report = run_pipeline(identifier, classifier, fields, catalog_of(sick_pool))
    assert report.end_to_end_accuracy == report.identifier_accuracy
    assert report.end_to_end_accuracy == pytest.approx(report.bounds.upper_bound, abs=0.05)


def test_always_wrong_classifier_diagnoses_nothing(fields, hf_pool):
    report = run_pipeline(OracleIdentifier(0.0, 0.0, 1),
                          OracleClassifier(truth_from_samples(hf_pool), 1.0, 1),
                          fields, catalog_of(hf_pool))
    assert np.trace(np.array(report.classifier_confusion.counts)) == 0
    assert report.end_to_end_accuracy == 0.0


@pytest.mark.slow
def test_independent_errors_multiply(sick_pool):
    fields = sick_fields(sick_pool, 2000)
    report = run_pipeline(OracleIdentifier(0.245, 0.0, 4),
                          OracleClassifier(truth_from_samples(sick_pool), 0.037, 4),
                          fields, catalog_of(sick_pool))
    assert report.sick_tiles == 50_000
    expected = 0.755 * 0.963
    sigma = math.sqrt(expected * (1 - expected) / report.sick_tiles)
    assert abs(report.end_to_end_accuracy - expected) < 3 * sigma
    bounds = report.bounds
    assert bounds.lower_bound <= report.end_to_end_accuracy <= bounds.upper_bound


@pytest.mark.slow
def test_oracle_identifier_recall(sick_pool):
    item = sick_fields(sick_pool, 1)[0]
    identifier = OracleIdentifier(0.25, 0.0, 5)
    hits = sum(len(identifier.detect(item, key=(i,))) for i in range(4000))
    assert 0.745 <= hits / (4000 * item.spec.cell_count) <= 0.755


def test_oracle_identifier_scores_by_tile_kind(fields):
    identifier = OracleIdentifier(0.0, 1.0, 6)
    for index, item in enumerate(fields):
        sick = {a.cell(item.spec) for a in item.sick_annotations()}
        for b in identifier.detect(item, key=(index,)):
            cell = (int(b.corners[1]) // item.spec.tile_h, int(b.corners[0]) // item.spec.tile_w)
            assert (b.score >= 0.5) == (cell in sick)


def test_oracle_classifier_error_rate(hf_pool):
    truth = truth_from_samples(hf_pool)
    classifier = OracleClassifier(truth, 0.037, 7)
    image_id = "rust_0.png"
    right = sum(int(np.argmax(classifier.classify(None, image_id, key=(i,))))
                == PlantClass.RUST.index for i in range(10_000))
    assert 0.955 <= right / 10_000 <= 0.971


def test_keyed_draws_accept_negative_seeds():
    draws = keyed_uniforms(-1, 0, (0, 0, 0))
    assert np.array_equal(draws, keyed_uniforms(-1, 0, (0, 0, 0)))
    assert ((draws >= 0) & (draws < 1)).all()
    assert not np.array_equal(draws, keyed_uniforms(1, 0, (0, 0, 0)))


def test_oracle_classifier_needs_truth(hf_pool):
    classifier = OracleClassifier(truth_from_samples(hf_pool), 0.0)
    with pytest.raises(ModelInvocationError):
        classifier.classify(None, "unknown.png")
    with pytest.raises(ValueError):
        OracleClassifier({}, 1.5)


def test_baseline_classifier_memorises_solid_colours(hf_pool):
    classifier = baseline_classifier(hf_pool)
    for s in hf_pool:
        probs = classifier.classify(s.pixels, s.image_id)
        assert probs.sum() == pytest.approx(1.0)
        assert PlantClass.ordered()[int(np.argmax(probs))] is s.label


def test_baseline_classifier_needs_every_class(labels_csv):
    samples = [sample(r.image_id, r.label) for r in read_label_table(labels_csv)]
    with pytest.raises(TrainingError):
        baseline_classifier(samples)


def test_tta_pipeline_keeps_perfect_accuracy(fields, hf_pool):
    report = run_pipeline(OracleIdentifier(0.0, 0.0, 1),
                          OracleClassifier(truth_from_samples(hf_pool), 0.0, 1),
                          fields, catalog_of(hf_pool),
                          tta=["identity", "hflip", "vflip", "rot180"])
    assert report.end_to_end_accuracy == 1.0
    assert report.unresolvable_boxes == 0


def test_parallel_run_matches_serial(fields, hf_pool):
    def run(workers):
        return run_pipeline(OracleIdentifier(0.3, 0.1, 8),
                            OracleClassifier(truth_from_samples(hf_pool), 0.2, 8),
                            fields, catalog_of(hf_pool), max_workers=workers)

    assert run(1) == run(4)


def test_identifier_failure_names_the_mosaic(fields, hf_pool):
    class Broken:
        thread_safe = False

        def detect(self, item, key=()):
            raise RuntimeError("no weights")

    with pytest.raises(ModelInvocationError) as info:
        run_pipeline(Broken(), OracleClassifier(truth_from_samples(hf_pool), 0.0),
                     fields, catalog_of(hf_pool))
    assert info.value.context["mosaic"] == 0
    assert "no weights" in str(info.value)


def test_classifier_failure_names_the_tile(fields, hf_pool):
    class Broken:
        thread_safe = False
        needs_pixels = True

        def classify(self, pixels, image_id=None, key=()):
            raise RuntimeError("bad input")

    with pytest.raises(ModelInvocationError) as info:
        run_pipeline(OracleIdentifier(0.0, 0.0), Broken(), fields, catalog_of(hf_pool))
    context = info.value.context
    assert {"mosaic", "tile", "image_id"} <= set(context)
    assert context["image_id"] in catalog_of(hf_pool)


def test_catalog_miss_is_reported(fields, hf_pool):
    with pytest.raises(ModelInvocationError) as info:
        run_pipeline(OracleIdentifier(0.0, 0.0), OracleClassifier(truth_from_samples(hf_pool), 0.0),
                     fields, catalog_of(hf_pool[:1]))
    assert "image_id" in info.value.context


def test_pipeline_needs_fields(hf_pool):
    with pytest.raises(ValueError):
        run_pipeline(OracleIdentifier(0.0, 0.0), OracleClassifier({}, 0.0), [], {})


def test_summary_omits_tile_rows(fields, hf_pool):
    report = run_pipeline(OracleIdentifier(0.0, 0.0), OracleClassifier(truth_from_samples(hf_pool),
                                                                        0.0), fields,
                          catalog_of(hf_pool))
    summary = report.summary()
    assert "diagnoses" not in summary
    assert summary["end_to_end_accuracy"] == 1.0
