#!/usr/bin/env python3
"""Smoke test for the lierec_py extension module.

Build the extension first, then run this script from the repository root:

    cargo build -p lierec-py --release
    python3 python/smoke_test.py

The script loads the cdylib straight from the cargo target directory (no
install step) and drives the main surface end to end: exp/log maps,
trajectory synthesis, the closed-form baseline, encoder training and
checkpoint round trips.
"""

import importlib.machinery
import importlib.util
import math
import os
import sys
import tempfile

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load_module():
    candidates = [
        os.path.join(REPO_ROOT, "target", profile, name)
        for profile in ("release", "debug")
        for name in ("liblierec_py.so", "lierec_py.so", "liblierec_py.dylib")
    ]
    for path in candidates:
        if os.path.exists(path):
            loader = importlib.machinery.ExtensionFileLoader("lierec_py", path)
            spec = importlib.util.spec_from_loader("lierec_py", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            print(f"loaded {path}")
            return module
    sys.exit(
        "could not find the extension; build it with "
        "`cargo build -p lierec-py --release` first"
    )


def approx_equal(a, b, tol):
    return all(abs(x - y) < tol for x, y in zip(a, b)) and len(a) == len(b)


def main():
    lr = load_module()
    print(f"lierec_py {lr.__version__}, groups: {lr.GROUPS}")

    # hat/vee and exp/log round trips
    for kind, coords in [
        ("so3", [0.3, -0.2, 0.9]),
        ("se2", [1.0, -0.5, 0.7]),
        ("se3", [0.1, 0.2, -0.3, 0.4, -0.5, 0.6]),
        ("sl2r", [0.4, 0.3, -0.2]),
    ]:
        assert lr.vee(kind, lr.hat(kind, coords)) == coords
        back = lr.group_log(kind, lr.group_exp(kind, coords))
        assert approx_equal(back, coords, 1e-9), (kind, back, coords)
    print("hat/vee and exp/log round trips ok")

    # a quarter turn about z
    rot = lr.group_exp("so3", [0.0, 0.0, math.pi / 2])
    assert approx_equal(rot[0], [0.0, -1.0, 0.0], 1e-12)

    # the logarithm refuses the branch cut
    try:
        lr.group_log("so3", lr.group_exp("so3", [0.0, 0.0, math.pi]))
    except RuntimeError as e:
        assert "branch" in str(e)
    else:
        sys.exit("expected a branch-cut error")
    print("branch cut rejection ok")

    # regime classification
    assert lr.classify_regime([0.0, 1.0, -1.0]) == "elliptic"
    assert lr.classify_regime([1.0, 0.0, 0.0]) == "hyperbolic"
    assert lr.classify_regime([0.0, 1.0, 0.0]) == "parabolic"
    print("regime classification ok")

    # clean synthesis and the closed-form baseline
    xi = [0.5, -0.2, 0.3]
    traj = lr.generate_clean("se2", xi, dt=0.1, steps=20)
    assert traj.kind == "se2" and traj.steps == 20 and len(traj) == 21
    assert approx_equal(traj.baseline_estimate(), xi, 1e-10)
    for inc in traj.increments():
        assert approx_equal(inc, [0.1 * c for c in xi], 1e-10)
    print("clean synthesis and baseline recovery ok")

    # noisy synthesis is seeded
    noisy_a = lr.generate_noisy("se3", [0.1] * 6, 0.05, seed=9)
    noisy_b = lr.generate_noisy("se3", [0.1] * 6, 0.05, seed=9)
    assert noisy_a.poses == noisy_b.poses
    assert noisy_a.noise_sigma == 0.05
    print("seeded noisy synthesis ok")

    # train a small encoder and check it beats a coarse error bar
    train_set = lr.generate_dataset("se2", 400, seed=3)
    test_set = lr.generate_dataset("se2", 20, seed=4)
    enc = lr.Encoder.train(train_set, hidden=(32, 32), epochs=15, seed=7)
    assert enc.kind == "se2" and enc.hidden_dims == (32, 32)
    history = enc.history()
    assert len(history) == 15
    assert history[-1][1] < history[0][1], "training loss should drop"
    worst = max(
        abs(p - t)
        for traj in test_set
        for p, t in zip(enc.predict(traj), traj.true_xi)
    )
    assert worst < 0.25, f"worst component error {worst}"
    print(f"encoder training ok (worst test component error {worst:.4f})")

    # checkpoint and dataset files round-trip
    with tempfile.TemporaryDirectory() as tmp:
        model_path = os.path.join(tmp, "model.lem")
        enc.save(model_path)
        loaded = lr.Encoder.load(model_path)
        probe = test_set[0]
        assert loaded.predict(probe) == enc.predict(probe)

        data_path = os.path.join(tmp, "data.ljd")
        lr.write_dataset(data_path, test_set, seed=4)
        back = lr.read_dataset(data_path)
        assert len(back) == len(test_set)
        assert back[0].poses == test_set[0].poses
        assert back[0].true_xi == test_set[0].true_xi
    print("checkpoint and dataset round trips ok")

    # external pose lists can be wrapped and analyzed
    wrapped = lr.Trajectory.from_poses("se2", traj.dt, traj.poses, traj.true_xi)
    assert approx_equal(wrapped.baseline_estimate(), xi, 1e-10)
    print("external pose wrapping ok")

    print("smoke test passed")


if __name__ == "__main__":
    main()
