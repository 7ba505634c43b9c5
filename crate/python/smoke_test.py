"""Smoke test for the Python bindings.

Build the extension and place it next to this script first:

    cargo build --release -p chernlab-py --features extension-module
    cp target/release/libchernlab_py.so python/chernlab.so
    python3 python/smoke_test.py
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import chernlab  # noqa: E402


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert "hopf" in chernlab.metric_names()

    fs = chernlab.Metric("fubini_study:n=2")
    origin = [0j, 0j]
    assert fs.dim == 2
    assert close(fs.matrix(origin)[0][0], 1.0, 1e-15)
    r = fs.curvature(origin)
    assert close(r[0][0][0][0], 2.0, 1e-12) and close(r[0][0][1][1], 1.0, 1e-12)
    assert close(fs.ricci(origin)["ric2"][1][1], 3.0, 1e-12)
    assert close(fs.hsc(origin, [1, 0]), 2.0, 1e-12)
    assert close(fs.hbc(origin, [1, 0], [0, 1]), 1.0, 1e-12)
    assert close(fs.sbc(origin, [[2, 0], [0, 1]]), 6.5, 1e-12)
    spec = fs.spectrum(origin)
    assert all(close(a, b, 1e-10) for a, b in zip(spec["eigenvalues"], [1, 1, 1, 3]))

    hopf = chernlab.Metric("hopf")
    fit = hopf.einstein_fit(samples=20, seed=1)
    assert close(fit["lambda"], 1.0, 1e-9), fit
    report = hopf.classify(samples=20, seed=1)
    assert report["pluriclosed"]["pass"] and not report["kahler"]["pass"]
    bound = hopf.bound_check([1 + 0j, 0j])
    assert bound["holds"]

    text = chernlab.Metric.from_text("n = 1\ng[1][1] = 1 / (1 + abs2(z1))^2\n")
    assert close(text.ricci([0.3 + 0.1j])["ric2"][0][0].real, 2 * text.matrix([0.3 + 0.1j])[0][0].real, 1e-10)

    f = chernlab.Map("dilation:c=2")
    assert f([0.1 + 0.2j, 0.3j]) == [0.2 + 0.4j, 0.6j]
    assert f.has_inverse and close(f.inverse([0.2, 0.4])[1], 0.2, 1e-15)
    cl = chernlab.chern_lu(f, fs, fs, [0.1 + 0.1j, -0.2j])
    assert cl["residual"] <= 1e-5, cl
    ay = chernlab.aubin_yau(f, fs, fs, [0.1 + 0.1j, -0.2j])
    assert ay["residual"] <= 1e-4, ay

    try:
        chernlab.Map.from_text("n = 1\nf1 = conj(z1)\n")
    except chernlab.ConfigError:
        pass
    else:
        raise AssertionError("conjugation in a map must be rejected")
    try:
        chernlab.Metric("hyperbolic_ball").matrix([1.5, 0])
    except chernlab.DomainError:
        pass
    else:
        raise AssertionError("points outside the ball must be rejected")

    code, out, _ = chernlab.run_cli(["analyze", "--metric", "flat", "--points", "(0.1,0.2)"])
    record = json.loads(out.splitlines()[0])
    assert code == 0 and record["schema_version"] == 1 and record["curvature_max"] == 0.0
    assert not math.isnan(record["scalar2"])

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
