"""Smoke test for the gridspread extension module.

Build and install first:  pip install ./crates/py --no-build-isolation
"""

import gridspread as gs

assert gs.select_k(13) == 2
assert gs.lower_bound(13) == 4
assert gs.upper_bound(13, 2, "inf") == 7.0

pair, method, k, guarantee = gs.construct(9, 2, "special")
assert (method, k, guarantee) == ("special", 3, 3)
value, witness, examined = pair.verify("inf")
assert value >= guarantee, value
assert pair.verify("inf", algorithm="naive")[:2] == (value, witness)

text = pair.serialize()
again = gs.parse(text)
assert again == pair and again.serialize() == text

u, v, _, combined = pair.upper_bound_witness()
assert u * v <= 9 - 1 and combined <= 5

assert gs.count_solutions(3, 2, 1, 3.0) == 840
optimum, best, _ = gs.exact_optimum(2, 2, "inf")
assert optimum == 2.0 and best.verify("inf")[0] == 2.0

assert "<svg" in pair.render("svg", k=3)

try:
    gs.exact_optimum(4, 2, "inf")
except ValueError as e:
    assert "9" in str(e)
else:
    raise AssertionError("oracle accepted a 4x4 grid")

print("ok", pair, value, witness)
