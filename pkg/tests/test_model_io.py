import random

import pytest

from croptree import (Dataset, LabeledInstance, ModelFormatError, TrainParams,
                      load_model, predict, save_model, train)
from support import random_dataset, random_feature_vector


def _model(algorithm="gainratio", seed=1, rng_seed=12):
    ds = random_dataset(random.Random(rng_seed), max_instances=30, n_attrs=4)
    return train(ds, TrainParams(algorithm, seed=seed))


class TestSave:
    def test_header_layout(self):
        model = _model()
        text = save_model(model).decode()
        lines = text.split("\n")
        assert lines[0] == "croptree-model v1"
        assert lines[1] == "algorithm: gainratio"
        assert lines[2] == "attributes: a0,a1,a2,a3"
        assert lines[3] == "classes: X,Y,Z"
        assert lines[4] == "params: min_leaf=2 confidence_factor=0.25 prune=true seed=1"
        assert lines[5] == "tree:"
        assert text.endswith("\n")
        assert "\r" not in text

    def test_single_leaf_body_is_one_line(self):
        ds = Dataset(("a0",), ("X", "Y"),
                     (LabeledInstance((1.0,), "X"), LabeledInstance((2.0,), "X")))
        model = train(ds, TrainParams("gainratio"))
        body = save_model(model).decode().split("\n")[6:-1]
        assert body == [": X (2/0)"]

    def test_impure_leaf_carries_distribution(self):
        ds = Dataset(("a0",), ("X", "Y"),
                     (LabeledInstance((1.0,), "X"),
                      LabeledInstance((1.0,), "X"),
                      LabeledInstance((1.0,), "Y")))
        model = train(ds, TrainParams("gainratio"))
        body = save_model(model).decode().split("\n")[6:-1]
        assert body == [": X (3/1) {X:2,Y:1}"]

    def test_branch_lines_nest_with_bar_indentation(self):
        ds = Dataset(("a0", "a1"), ("X", "Y"), tuple(
            LabeledInstance((float(v), float(v % 3)), "X" if v < 3 else "Y")
            for v in range(6)))
        model = train(ds, TrainParams("gainratio", min_leaf=1, prune=False))
        body = save_model(model).decode().split("\n")[6:-1]
        assert body[0].startswith("a0 <= ")
        assert any(line.startswith("a0 > ") for line in body)

    def test_auto_k_is_stored_resolved(self):
        model = _model("randomsubset")
        text = save_model(model).decode()
        assert "params: k=3 seed=1" in text  # ceil(log2(4)) + 1


class TestRoundTrip:
    @pytest.mark.parametrize("algorithm",
                             ["gainratio", "randomsubset", "reducederror"])
    def test_save_load_save_is_byte_identical(self, algorithm):
        for rng_seed in range(8):
            model = _model(algorithm, seed=rng_seed + 1, rng_seed=rng_seed)
            blob = save_model(model)
            again = save_model(load_model(blob))
            assert again == blob

    def test_loaded_params_match(self):
        model = _model("reducederror", seed=9)
        loaded = load_model(save_model(model))
        assert loaded.params == model.params
        assert loaded.attribute_names == model.attribute_names
        assert loaded.class_domain == model.class_domain

    def test_predictions_identical_on_1000_random_vectors(self):
        model = _model(rng_seed=3)
        loaded = load_model(save_model(model))
        rng = random.Random(99)
        for _ in range(1000):
            feats = random_feature_vector(rng, 4)
            assert predict(model, feats) == predict(loaded, feats)

    def test_fractional_weights_round_trip(self):
        # missing values make leaf weights fractional; text must preserve them
        rng = random.Random(21)
        for _ in range(10):
            ds = random_dataset(rng, max_instances=20, n_attrs=3,
                                missing_prob=0.4)
            model = train(ds, TrainParams("gainratio", min_leaf=1, prune=False))
            blob = save_model(model)
            loaded = load_model(blob)
            assert loaded.root == model.root
            assert save_model(loaded) == blob


class TestLoadErrors:
    def _blob(self):
        return save_model(_model())

    def test_truncated_file(self):
        blob = self._blob()
        lines = blob.decode().split("\n")
        truncated = "\n".join(lines[:-3]) + "\n"
        with pytest.raises(ModelFormatError):
            load_model(truncated)

    def test_missing_final_newline(self):
        with pytest.raises(ModelFormatError, match="newline"):
            load_model(self._blob()[:-1])

    def test_crlf_rejected(self):
        with pytest.raises(ModelFormatError, match="LF"):
            load_model(self._blob().replace(b"\n", b"\r\n"))

    def test_bad_magic(self):
        blob = self._blob().replace(b"croptree-model v1", b"other-format v9")
        with pytest.raises(ModelFormatError, match="header"):
            load_model(blob)

    def test_unknown_algorithm(self):
        blob = self._blob().replace(b"algorithm: gainratio", b"algorithm: c5")
        with pytest.raises(ModelFormatError, match="algorithm"):
            load_model(blob)

    def test_bad_params(self):
        blob = self._blob().replace(b"min_leaf=2", b"min_leaf=two")
        with pytest.raises(ModelFormatError, match="params"):
            load_model(blob)

    def test_weight_distribution_mismatch(self):
        text = ("croptree-model v1\nalgorithm: gainratio\n"
                "attributes: a0\nclasses: X,Y\n"
                "params: min_leaf=2 confidence_factor=0.25 prune=true seed=1\n"
                "tree:\n: X (5/1) {X:2,Y:1}\n")
        with pytest.raises(ModelFormatError, match="do not match"):
            load_model(text)

    def test_non_majority_class_rejected(self):
        text = ("croptree-model v1\nalgorithm: gainratio\n"
                "attributes: a0\nclasses: X,Y\n"
                "params: min_leaf=2 confidence_factor=0.25 prune=true seed=1\n"
                "tree:\n: Y (3/1) {X:2,Y:1}\n")
        with pytest.raises(ModelFormatError, match="majority"):
            load_model(text)

    def test_mismatched_branch_pair(self):
        text = ("croptree-model v1\nalgorithm: gainratio\n"
                "attributes: a0,a1\nclasses: X,Y\n"
                "params: min_leaf=2 confidence_factor=0.25 prune=true seed=1\n"
                "tree:\na0 <= 1: X (1/0)\na1 > 1: Y (1/0)\n")
        with pytest.raises(ModelFormatError, match="branch"):
            load_model(text)

    def test_unknown_attribute(self):
        text = ("croptree-model v1\nalgorithm: gainratio\n"
                "attributes: a0\nclasses: X,Y\n"
                "params: min_leaf=2 confidence_factor=0.25 prune=true seed=1\n"
                "tree:\nzz <= 1: X (1/0)\nzz > 1: Y (1/0)\n")
        with pytest.raises(ModelFormatError, match="attribute"):
            load_model(text)

    def test_trailing_garbage(self):
        blob = self._blob() + b": X (1/0)\n"
        with pytest.raises(ModelFormatError):
            load_model(blob)

    def test_error_carries_line_number(self):
        with pytest.raises(ModelFormatError) as info:
            load_model("croptree-model v1\nnot-a-header\n")
        assert info.value.line_number == 2
