import numpy as np
import pytest

from fieldforge.exceptions import (
    DuplicateImageError,
    InsufficientSourceError,
    InvalidTargetError,
)
from fieldforge.models.corpus import ClassDistribution, PlantClass
from fieldforge.models.rebalance import BalanceQuota, GeneratorConfig
from fieldforge.services.corpus import class_distribution, read_label_table
from fieldforge.services.imaging import load_image, save_png
from fieldforge.services.rebalance import (
    DirectoryGenerator,
    balance_plan,
    builtin_generator,
    synthesize,
    write_samples,
)

from .conftest import sample

LEAF_COUNTS = {"healthy": 416, "scab": 592, "rust": 622, "multiple_diseases": 91}


def test_plan_defaults_to_majority():
    quota = balance_plan(ClassDistribution(counts=LEAF_COUNTS))
    assert quota.as_dict() == {"healthy": 206, "multiple_diseases": 531, "rust": 0, "scab": 30}


def test_plan_with_explicit_target():
    quota = balance_plan(ClassDistribution(counts=LEAF_COUNTS), target=1000)
    assert quota.as_dict() == {"healthy": 584, "multiple_diseases": 909, "rust": 378, "scab": 408}


def test_plan_on_balanced_corpus_is_zero():
    quota = balance_plan(ClassDistribution(counts={c.value: 100 for c in PlantClass}))
    assert quota.total == 0


def test_plan_rejects_target_below_majority():
    with pytest.raises(InvalidTargetError):
        balance_plan(ClassDistribution(counts=LEAF_COUNTS), target=621)


def test_plan_on_fixture(labels_csv):
    quota = balance_plan(class_distribution(read_label_table(labels_csv)))
    assert quota.as_dict() == {"healthy": 1, "multiple_diseases": 3, "rust": 0, "scab": 1}


def test_counts_plus_quota_are_equal_across_classes(labels_csv):
    dist = class_distribution(read_label_table(labels_csv))
    quota = balance_plan(dist, target=9)
    assert {dist[c] + quota[c] for c in PlantClass} == {9}


def test_identity_generator_copies_seed():
    gen = builtin_generator()
    image = np.arange(8 * 12 * 3, dtype=np.uint8).reshape(8, 12, 3)
    out = gen.generate(image, PlantClass.RUST, rng_seed=1)
    np.testing.assert_array_equal(out, image)
    assert out is not image


def test_flip_generator_mirrors_or_keeps():
    gen = builtin_generator(flip=True)
    image = np.arange(8 * 12 * 3, dtype=np.uint8).reshape(8, 12, 3)
    outputs = [gen.generate(image, PlantClass.RUST, rng_seed=s) for s in range(20)]
    for out in outputs:
        assert np.array_equal(out, image) or np.array_equal(out, image[:, ::-1])
    assert any(np.array_equal(out, image[:, ::-1]) for out in outputs)
    mirrored = next(out for out in outputs if not np.array_equal(out, image))
    np.testing.assert_array_equal(mirrored[:, ::-1], image)


def test_jitter_keeps_mean_within_amplitude():
    gen = builtin_generator(brightness_jitter=0.1)
    grey = np.full((8, 12, 3), 100, dtype=np.uint8)
    for seed in range(10):
        out = gen.generate(grey, PlantClass.SCAB, rng_seed=seed)
        assert len(np.unique(out)) == 1
        assert 90 <= out.mean() <= 110


def test_rotation_preserves_non_square_dimensions():
    gen = builtin_generator(rotate_degrees=frozenset({90}))
    image = np.zeros((8, 12, 3), dtype=np.uint8)
    assert gen.generate(image, PlantClass.SCAB, rng_seed=0).shape == (8, 12, 3)


def test_generator_config_rejects_odd_rotations():
    with pytest.raises(ValueError):
        GeneratorConfig(rotate_degrees=frozenset({45}))


def test_synthesize_fills_quota_with_novel_ids(hf_pool):
    quota = BalanceQuota(per_class={"multiple_diseases": 2, "scab": 1})
    novel = synthesize(hf_pool, quota, builtin_generator(flip=True), rng_seed=4)
    assert [s.image_id for s in novel] == [
        "synth_multiple_diseases_0.png", "synth_multiple_diseases_1.png", "synth_scab_0.png"]
    assert [s.label for s in novel] == [
        PlantClass.MULTIPLE_DISEASES, PlantClass.MULTIPLE_DISEASES, PlantClass.SCAB]
    assert all(s.pixels.shape == (8, 12, 3) for s in novel)


def test_default_plan_balances_the_corpus(hf_pool):
    pool = hf_pool + [sample(f"rust_extra_{k}.png", PlantClass.RUST) for k in range(3)]
    records = [s.record for s in pool]
    quota = balance_plan(class_distribution(records))
    novel = synthesize(pool, quota, builtin_generator(flip=True), rng_seed=5)
    after = class_distribution(records + [s.record for s in novel])
    assert set(after.as_dict().values()) == {5}
    assert balance_plan(after).total == 0


def test_synthesize_zero_quota_is_empty(hf_pool):
    assert synthesize(hf_pool, BalanceQuota(per_class={}), builtin_generator(), 0) == []


def test_synthesize_is_deterministic_and_parallel_safe(hf_pool):
    quota = BalanceQuota(per_class={c.value: 3 for c in PlantClass})
    gen = builtin_generator(flip=True, rotate_degrees=frozenset({0, 180}), brightness_jitter=0.2)
    serial = synthesize(hf_pool, quota, gen, rng_seed=11)
    parallel = synthesize(hf_pool, quota, gen, rng_seed=11, max_workers=4)
    assert [s.image_id for s in serial] == [s.image_id for s in parallel]
    for a, b in zip(serial, parallel):
        assert a.pixels.tobytes() == b.pixels.tobytes()


def test_synthesize_needs_source_images():
    pool = [sample("r.png", PlantClass.RUST)]
    quota = BalanceQuota(per_class={"multiple_diseases": 1})
    with pytest.raises(InsufficientSourceError):
        synthesize(pool, quota, builtin_generator(), rng_seed=0)


def test_synthesize_never_reuses_original_ids():
    pool = [sample("synth_rust_0.png", PlantClass.RUST)]
    with pytest.raises(DuplicateImageError):
        synthesize(pool, BalanceQuota(per_class={"rust": 1}), builtin_generator(), rng_seed=0)


def test_directory_generator_serves_resized_images(tmp_path):
    save_png(np.full((20, 30, 3), 7, dtype=np.uint8), tmp_path / "rust" / "a.png")
    gen = DirectoryGenerator(tmp_path)
    assert gen.available(PlantClass.RUST) == 1
    out = gen.generate(np.zeros((8, 12, 3), dtype=np.uint8), PlantClass.RUST, rng_seed=3)
    assert out.shape == (8, 12, 3)
    assert (out == 7).all()
    with pytest.raises(InsufficientSourceError):
        gen.generate(np.zeros((8, 12, 3), dtype=np.uint8), PlantClass.SCAB, rng_seed=3)


def test_write_samples_round_trips(tmp_path, hf_pool):
    novel = synthesize(hf_pool, BalanceQuota(per_class={"rust": 2}), builtin_generator(), 0)
    table = write_samples(novel, tmp_path / "out")
    records = read_label_table(table)
    assert [r.image_id for r in records] == ["synth_rust_0.png", "synth_rust_1.png"]
    np.testing.assert_array_equal(load_image(tmp_path / "out" / "synth_rust_0.png"),
                                  novel[0].pixels)
