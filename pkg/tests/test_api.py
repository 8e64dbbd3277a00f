import base64

import numpy as np
import pytest
from fastapi.testclient import TestClient

from fieldforge.api.registry import ModelRegistry
from fieldforge.config import Settings
from fieldforge.main import create_app
from fieldforge.models.corpus import HighFidelityRecord, PlantClass
from fieldforge.services.classifiers import baseline_classifier
from fieldforge.services.corpus import write_label_table
from fieldforge.services.identifiers import train_tile_identifier
from fieldforge.services.imaging import encode_png, save_png
from fieldforge.services.mosaic import generate_mosaic

from .conftest import CLASS_COLOURS, solid


def b64(pixels):
    return base64.b64encode(encode_png(pixels)).decode("ascii")


@pytest.fixture
def mosaics(hf_pool, soil_texture, small_spec):
    return [generate_mosaic(hf_pool, soil_texture, small_spec.model_copy(update={"rng_seed": s}))
            for s in range(6)]


@pytest.fixture
def client(hf_pool, mosaics):
    registry = ModelRegistry(classifier=baseline_classifier(hf_pool),
                             identifier=train_tile_identifier(mosaics))
    with TestClient(create_app(registry=registry)) as client:
        yield client


@pytest.fixture
def empty_client():
    registry = ModelRegistry(errors={"identifier": "no mosaics", "classifier": "no labels"})
    with TestClient(create_app(registry=registry)) as client:
        yield client


def test_root_lists_routes(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["routes"] == ["/", "/algorithms", "/status", "/predict/{algorithm}"]


def test_algorithms_lists_bound_models(client, empty_client):
    assert client.get("/algorithms").json() == {"algorithms": ["identifier", "classifier"]}
    assert empty_client.get("/algorithms").json() == {"algorithms": []}


def test_status_reports_readiness(client, empty_client):
    models = client.get("/status").json()["models"]
    assert models["classifier"]["ready"] and models["identifier"]["ready"]
    models = empty_client.get("/status").json()["models"]
    assert models["identifier"] == {"ready": False, "detail": "no mosaics"}


def test_classifier_prediction(client):
    response = client.post("/predict/classifier",
                           json={"image": b64(solid(CLASS_COLOURS[PlantClass.RUST]))})
    assert response.status_code == 200
    body = response.json()
    assert body["algorithm"] == "classifier"
    assert body["label"] == "rust"
    assert set(body["probabilities"]) == {c.value for c in PlantClass}
    assert sum(body["probabilities"].values()) == pytest.approx(1.0)


def test_identifier_prediction(client, mosaics):
    item = mosaics[0]
    response = client.post("/predict/identifier", json={"image": b64(item.image)})
    assert response.status_code == 200
    body = response.json()
    assert body["algorithm"] == "identifier"
    for payload in body["boxes"]:
        x1, y1, x2, y2 = payload["box"]
        assert 0 <= x1 < x2 <= item.spec.width_px and 0 <= y1 < y2 <= item.spec.height_px
        assert 0 <= payload["score"] <= 1
        assert payload["label"] == 1


def test_identifier_rejects_other_sizes(client):
    response = client.post("/predict/identifier", json={"image": b64(solid((0, 0, 0), 10, 10))})
    assert response.status_code == 400
    assert "message" in response.json()


@pytest.mark.parametrize("image", [
    "not base64!!",
    base64.b64encode(b"plain text, not a picture").decode("ascii"),
])
def test_undecodable_images_are_rejected(client, image):
    response = client.post("/predict/classifier", json={"image": image})
    assert response.status_code == 400
    assert response.json()["message"]


@pytest.mark.parametrize("body", [{"image": ""}, {"image": 5}, {}, [1, 2]])
def test_malformed_bodies_are_bad_requests(client, body):
    response = client.post("/predict/classifier", json=body)
    assert response.status_code == 400
    assert response.json()["message"]
    assert "detail" not in response.json()


def test_unknown_algorithm_is_not_found(client):
    response = client.post("/predict/segmenter", json={"image": b64(solid((0, 0, 0)))})
    assert response.status_code == 404
    assert "segmenter" in response.json()["message"]


def test_unloaded_model_is_unavailable(empty_client):
    response = empty_client.post("/predict/classifier", json={"image": b64(solid((0, 0, 0)))})
    assert response.status_code == 503
    assert "no labels" in response.json()["message"]


def test_registry_load_records_failures(tmp_path):
    registry = ModelRegistry.load(Settings(data_root=tmp_path))
    assert registry.available() == []
    assert set(registry.errors) == {"identifier", "classifier"}


def test_registry_load_fits_classifier_from_data_root(tmp_path):
    records = [HighFidelityRecord(image_id=f"Train_{i}.jpg", label=c)
               for i, c in enumerate(PlantClass.ordered())]
    (tmp_path / "train.csv").write_text(write_label_table(records), encoding="utf-8")
    for record in records:
        save_png(solid(CLASS_COLOURS[record.label]), tmp_path / "images" / record.image_id)
    registry = ModelRegistry.load(Settings(data_root=tmp_path))
    assert registry.available() == ["classifier"]
    probs = registry.classifier.classify(solid(CLASS_COLOURS[PlantClass.SCAB]))
    assert PlantClass.ordered()[int(np.argmax(probs))] is PlantClass.SCAB
    assert "mosaic" in registry.errors["identifier"]
