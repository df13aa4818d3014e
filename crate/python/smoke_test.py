"""Smoke test for the weak_tt extension module.

Build and run from the repository root:

    cargo build --release -p weak-tt-py
    cp target/release/libweak_tt_py.so python/weak_tt.so
    python3 python/smoke_test.py
"""

import json
import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import weak_tt  # noqa: E402


def check_schemes():
    for scheme in ("short-ctext", "short-key"):
        params = weak_tt.SchemeParams(scheme, 5, m=40)
        system = weak_tt.System.setup(params, seed=3)
        for j in range(6):
            ct = system.encrypt(j, seed=j)
            assert system.decrypt_all(ct) == [int(i <= j) for i in range(1, 6)], (scheme, j)
        restored = weak_tt.System.from_json(system.to_json())
        ct = weak_tt.Ciphertext.from_json(system.encrypt(2, seed=9).to_json())
        assert restored.decrypt(2, ct) == 1 and restored.decrypt(3, ct) == 0
    print("schemes: ok")


def check_reports():
    params = weak_tt.SchemeParams("short-ctext", 4, m=32)
    assert weak_tt.correctness(params, setups=3)["failures"] == 0
    assert weak_tt.hybrids(params, i_star=2)["failures"] == 0

    white = weak_tt.index_hiding(params, 2, adversary="white-box-transparent", trials=200)
    assert white["successes"] == white["trials"] == 200
    const = weak_tt.index_hiding(params, 2, game="two-index", trials=2000, seed=1)
    # Floats travel as shortest round-trip decimal strings.
    assert float(const["ci_low"]) <= 0 <= float(const["ci_high"])

    x = weak_tt.xor_identity(Fraction(3, 4), "1/4")
    assert (x["adv"], x["two_adv"]) == (Fraction(1, 4), Fraction(1, 8))

    sweep = weak_tt.input_matching(2, [4, 6])
    assert [r["optimal_advantage"] for r in sweep["rows"]] == [Fraction(25, 84), Fraction(1507, 7440)]

    lemma = weak_tt.hash_lemma(2, 2, [0, 1], 1)
    assert lemma["sd"] == Fraction(1, 4) and lemma["pass"]

    attack = weak_tt.attack(weak_tt.SchemeParams("short-ctext", 6, m=216), runs=5)
    assert attack["target"] == 3 and attack["accusations"][3] == 5
    json.dumps(attack, default=str)
    print("reports: ok")


def check_errors():
    for bad in (lambda: weak_tt.SchemeParams("short-ctext", 4, m=3),
                lambda: weak_tt.SchemeParams("long", 4)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        weak_tt.SchemeParams("short-ctext", 10)
    except MemoryError:
        pass
    else:
        raise AssertionError("expected MemoryError for the default m at n = 10")
    print("errors: ok")


if __name__ == "__main__":
    check_schemes()
    check_reports()
    check_errors()
    print("smoke test passed")
