"""Smoke test for the pyeqsketch extension.

Build and run:
    cargo build --release -p eqsketch-py --features extension-module
    cp target/release/libpyeqsketch.so python/pyeqsketch.so
    python3 python/smoke_test.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import pyeqsketch  # noqa: E402

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "crates" / "cli" / "corpus"


def main():
    monoid = pyeqsketch.parse_spec((CORPUS / "monoid.msl").read_text())
    assert monoid.equations() == ["runit", "linv", "comm"]
    assert monoid.proofs() == ["loop", "instance", "closed"]

    stages = monoid.compile("inv")
    assert stages == {"D": "<p1>", "I": "<p1>", "Q": "i<p1>", "arr": "i<p1>"}, stages

    left, right, equal = monoid.check_eq("runit")
    assert (left, right, equal) == ("m<p1,e>", "p1", False)

    for proof in monoid.proofs():
        print(proof, "->", monoid.check_proof(proof), "levels:", monoid.normalize_proof(proof))

    assert monoid.oracle("comm", 2) is not None
    assert monoid.oracle("runit", 1) is None

    compile_spec = pyeqsketch.parse_spec((CORPUS / "compile.msl").read_text())
    assert pyeqsketch.parse_spec(compile_spec.print()).print() == compile_spec.print()

    broken = pyeqsketch.parse_spec((CORPUS / "broken.msl").read_text())
    for proof in broken.proofs():
        try:
            broken.check_proof(proof)
        except ValueError as e:
            print(proof, "rejected:", e)
        else:
            raise AssertionError(f"{proof} should be rejected")

    try:
        pyeqsketch.parse_spec("sort s\nop f : s -> q\n")
    except ValueError as e:
        print("input error:", e)
    else:
        raise AssertionError("undeclared sort should be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
