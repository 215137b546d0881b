"""Smoke test for the halfspace_py extension.

Build and install first:
    pip install maturin
    cd crates/py && maturin build --release -o dist && pip install dist/*.whl
"""

import math
import os
import tempfile

import halfspace_py as hs

GAUSS3 = {"kind": "gaussian", "d": 3}


def main():
    w_star = hs.Hyperplane([1.0, 2.0, 2.0])
    assert abs(sum(c * c for c in w_star.w) - 1.0) < 1e-12
    assert w_star.predict([0.0, 0.0, 0.0]) == 1

    data = hs.Dataset.generate(GAUSS3, w_star, 2000, seed=5)
    assert len(data) == 2000 and data.dim == 3

    lp = hs.train_lp(data)
    assert lp is not None and data.error(lp) == 0.0

    avg = hs.train_averaging(data)
    assert avg.angle(w_star) < 0.2

    noisy = hs.Dataset.generate(GAUSS3, w_star, 500, seed=5, noise={"kind": "rcn", "nu": 0.2})
    assert hs.train_lp(noisy) is None

    model, l1, train_err = hs.train_poly(noisy, 3)
    assert model.kind == "poly_threshold"
    assert train_err <= l1 / 2 + 1e-12
    assert hs.Model.from_json(model.to_json()).to_json() == model.to_json()

    est, radius = hs.mc_error(avg, GAUSS3, w_star, 20000, seed=1)
    assert abs(est - avg.angle(w_star) / math.pi) <= radius

    p = hs.project_cone_cap([0.0, 1.0, 0.0], hs.Hyperplane([1.0, 0.0, 0.0]), 0.3)
    assert abs(math.atan2(p[1], p[0]) - 0.3) < 1e-9

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "d.csv")
        data.write_csv(path)
        back = hs.Dataset.read_csv(path)
        assert back.xs == data.xs and back.ys == data.ys

    report = hs.run_experiment({
        "marginal": GAUSS3,
        "learner": {"kind": "averaging"},
        "n_train": 5000,
        "n_eval": 10000,
        "epsilon": 0.1,
        "seed": 3,
    })
    assert report["learner"] == "averaging" and report["angle"] < 0.1

    rows = hs.run_sweep({
        "marginal": GAUSS3,
        "noise": {"kind": "rcn", "nu": [0.0, 0.1]},
        "learners": ["averaging", "poly"],
        "n_train": 1000,
        "n_eval": 2000,
        "epsilon": 0.1,
        "seed": 0,
        "seeds": [1, 2],
    })
    assert len(rows) == 8 and all(r["mc_error"] is not None for r in rows)

    checks = hs.check_properties(GAUSS3, 10, 1)
    assert all(c["pass"] is None for c in checks)

    try:
        hs.run_experiment({"marginal": GAUSS3, "learner": {"kind": "lp"}, "bogus": 1})
    except hs.HalfspaceError as e:
        assert "bogus" in str(e)
    else:
        raise AssertionError("unknown key accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
