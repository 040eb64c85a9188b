"""Smoke test for the pdmq extension module.

Build with `cargo build --release -p pdmq-python --features extension-module`,
copy target/release/libpdmq.so to python/pdmq.so (or `maturin develop` in
crates/python), then run `python3 python/smoke_test.py`.
"""
import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import pdmq  # noqa: E402


def main():
    op = pdmq.weyl("p^2/(2*M0*x^3)")
    prefactor, bracket = op.factored()
    assert prefactor == "-1/2", prefactor
    assert bracket.coefficient(0) == [("3", "-5")], bracket.coefficient(0)
    assert op.is_hermitian()
    assert op == pdmq.weyl_kinetic_operator("3")

    for a in ("-1", "-1/3"):
        assert pdmq.sandwich(a) == op, a
    assert pdmq.ordering_roots("expanded") == [("-1", True), ("-1/3", True)]
    assert [a for a, _ in pdmq.ordering_roots("paper")] == ["-1/6", "1/2"]

    _, restored = pdmq.point_mass(op)
    assert restored.coefficient(1) == []
    assert restored.coefficient(0) == [("-9/200", "-2")], restored.coefficient(0)

    assert pdmq.commutator_residual("2/7").is_zero()
    assert pdmq.inverse_square("-1/3") == "-9/100"
    assert pdmq.inverse_square("-1/6", "paper") == "-9/100"
    diff = pdmq.partner("0", "paper") - pdmq.partner("0", "expanded")
    assert [e for _, e in diff.coefficient(0)] == ["-5"]

    he = pdmq.helium()
    assert abs(he["R_c"] / 2.947e-9 - 1) < 5e-3, he["R_c"]

    levels = pdmq.oscillator_levels(count=4, points=4000)
    assert all(abs(l - (k + 0.5)) < 1e-6 for k, l in enumerate(levels)), levels
    a = pdmq.spectrum(points=400, count=3)
    b = pdmq.spectrum(a="-1/6", source="paper", points=400, count=3)
    assert a == b and all(math.isfinite(x) for x in a)

    code, out, _ = pdmq.cli(["match", "--source", "expanded"])
    assert code == 0 and [r["a"] for r in json.loads(out)["roots"]] == ["-1", "-1/3"]
    code, _, err = pdmq.cli(["transform", "--pipeline", "transform-first"])
    assert code == 2 and err.startswith("error: transform-first-refused"), err

    try:
        pdmq.weyl("x^(1/2")
    except ValueError as e:
        assert "byte 2" in str(e), e
    else:
        raise AssertionError("parse error not raised")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
