import json

import numpy as np
import pytest

from teleassist.datasets import (
    DemoSet,
    demoset_from_dict,
    demoset_to_dict,
    generate_synthetic,
    load_demoset,
    save_demoset,
)
from teleassist.errors import ParseError, SchemaError
from teleassist.promp import fit_promp

from helpers import make_trajectory


def resample_at_phases(demo, phases):
    own = (demo.timestamps - demo.timestamps[0]) / demo.duration
    return np.stack([np.interp(phases, own, demo.values[:, d])
                     for d in range(demo.n_dims)], axis=1)


class TestDoorReach:
    def test_demos_end_at_the_handle(self):
        ds = generate_synthetic("door-reach", count=20, seed=3)
        assert len(ds.demos) == 20
        for demo in ds.demos:
            endpoint = demo.values[-1, :3]
            assert np.linalg.norm(endpoint) < 0.05  # within jitter radius

    def test_angle_range_respected(self):
        ds = generate_synthetic("door-reach", count=30, seed=5,
                                approach_angle_range=(-0.2, 0.2))
        for demo in ds.demos:
            start = demo.values[0, :3]
            theta = np.arctan2(start[1], start[0])
            assert -0.25 <= theta <= 0.25


class TestPunch:
    def test_nine_per_family(self):
        ds = generate_synthetic("punch", count=27, seed=0)
        by_family = ds.split_by_label()
        assert sorted(by_family) == ["hook", "jab", "uppercut"]
        assert all(len(sub.demos) == 9 for sub in by_family.values())

    def test_family_recoverable_by_nearest_mean(self):
        ds = generate_synthetic("punch", count=27, seed=0)
        phases = np.linspace(0.0, 1.0, 40)
        means = {
            label: np.mean([resample_at_phases(d, phases) for d in sub.demos], axis=0)
            for label, sub in ds.split_by_label().items()
        }
        for demo, label in zip(ds.demos, ds.demo_labels):
            resampled = resample_at_phases(demo, phases)
            nearest = min(means, key=lambda k: np.linalg.norm(resampled - means[k]))
            assert nearest == label

    def test_families_well_separated_at_mid_phase(self):
        ds = generate_synthetic("punch", count=27, seed=0)
        mids = {}
        for label, sub in ds.split_by_label().items():
            mids[label] = np.stack([resample_at_phases(d, np.array([0.5]))[0, :3]
                                    for d in sub.demos])
        labels = sorted(mids)
        intra_sd = max(np.linalg.norm(mids[l].std(axis=0)) for l in labels)
        inter = min(
            np.linalg.norm(mids[a].mean(axis=0) - mids[b].mean(axis=0))
            for i, a in enumerate(labels)
            for b in labels[i + 1:]
        )
        assert inter >= 5.0 * intra_sd

    def test_seed_reproducibility_bit_identical(self):
        a = generate_synthetic("punch", count=27, seed=12)
        b = generate_synthetic("punch", count=27, seed=12)
        assert demoset_to_dict(a) == demoset_to_dict(b)
        for da, db in zip(a.demos, b.demos):
            np.testing.assert_array_equal(da.values, db.values)
            np.testing.assert_array_equal(da.timestamps, db.timestamps)

    def test_unknown_task_rejected(self):
        with pytest.raises(SchemaError):
            generate_synthetic("wave")


class TestEnvelopeCoverage:
    def test_two_sigma_envelope_covers_demo_samples(self):
        ds = generate_synthetic("door-reach", count=20, seed=7)
        promp = fit_promp(ds.demos, task_label=ds.task_label, frame=ds.frame)
        inside = 0
        total = 0
        for demo in ds.demos:
            phases = (demo.timestamps - demo.timestamps[0]) / demo.duration
            mean = promp.mean_at(phases)
            std = promp.std_at(phases)
            inside += int(np.sum(np.abs(demo.values - mean) <= 2.0 * std))
            total += demo.values.size
        assert inside / total >= 0.95


class TestPersistence:
    def test_round_trip_is_lossless(self, tmp_path):
        ds = generate_synthetic("punch", count=9, seed=2)
        path = tmp_path / "punch.demos.json"
        save_demoset(ds, path)
        back = load_demoset(path)
        assert back.task_label == ds.task_label
        assert back.frame == ds.frame
        assert back.provenance == ds.provenance
        assert back.demo_labels == ds.demo_labels
        assert back.channels == ds.channels
        for da, db in zip(ds.demos, back.demos):
            np.testing.assert_array_equal(da.timestamps, db.timestamps)
            np.testing.assert_array_equal(da.values, db.values)

    def test_parse_error_carries_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_demoset(path)

        doc = demoset_to_dict(generate_synthetic("door-reach", count=2, seed=0))
        doc["demos"][1]["samples"] = [[0.0]]
        with pytest.raises(ParseError) as exc_info:
            demoset_from_dict(doc, location="mem")
        assert "demos[1]" in str(exc_info.value)

    def test_version_gate(self):
        doc = demoset_to_dict(generate_synthetic("door-reach", count=2, seed=0))
        doc["version"] = 99
        with pytest.raises(ParseError):
            demoset_from_dict(doc)


class TestDemoSetInvariants:
    def test_needs_two_demos(self):
        t = make_trajectory([0.0, 1.0], np.zeros((2, 3)))
        with pytest.raises(SchemaError):
            DemoSet(task_label="x", frame="f", demos=[t])

    def test_mixed_layouts_rejected(self):
        from teleassist.trajectory import ChannelKind, ChannelSpec

        t1 = make_trajectory([0.0, 1.0], np.zeros((2, 3)))
        t2 = make_trajectory(
            [0.0, 1.0], np.zeros((2, 3)),
            channels=(ChannelSpec("chest", ChannelKind.ORIENTATION),),
        )
        with pytest.raises(SchemaError):
            DemoSet(task_label="x", frame="f", demos=[t1, t2])

    def test_label_count_must_match(self):
        t = make_trajectory([0.0, 1.0], np.zeros((2, 3)))
        with pytest.raises(SchemaError):
            DemoSet(task_label="x", frame="f", demos=[t, t], demo_labels=["a"])
