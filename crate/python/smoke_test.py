#!/usr/bin/env python3
"""Smoke test for the subposet_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/,
exposes it under the importable module name, and exercises the public
surface end to end. Run after `cargo build -p subposet-py [--release]`:

    python3 python/smoke_test.py
"""

import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libsubposet_py.so", "subposet_py.so", "libsubposet_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("no built extension found; run `cargo build -p subposet-py` first")
    stage = Path(tempfile.mkdtemp(prefix="subposet_py_"))
    shutil.copy2(built, stage / "subposet_py.so")
    sys.path.insert(0, str(stage))
    import subposet_py

    return subposet_py


sp = load_module()
checks = 0


def check(cond, label):
    global checks
    assert cond, label
    checks += 1


def frac(pair):
    return Fraction(int(pair[0]), int(pair[1]))


# Poset algebra over the seven bases.
b = sp.parse("B")
check(b.size == 4 and b.longest_chain == 2, "butterfly shape")
check(b.b == (2, 1) and b.e == 2, "butterfly b and e")

p1 = sp.parse("S' * D3 + B + B")
check(p1.size == 19 and p1.longest_chain == 9, "S'*D3+B+B shape")
check(p1.b == (13, 1) and p1.e == 13, "S'*D3+B+B b = e = 13")
check(p1.expr == "S' * D3 + B + B", "expression round-trip")

q = sp.parse("B") + sp.parse("B")
check(q.size == 8 and q.b == (5, 1) and q.e == 5, "series sum via +")
glued = sp.parse("D3") * sp.parse("D3")
check(glued.size == 9 and glued.longest_chain == 5, "glued product via *")
try:
    sp.parse("B") * sp.parse("B")
    sys.exit("gluing without a greatest element must raise")
except ValueError:
    checks += 1

check(sp.parse("S").dual().is_isomorphic(sp.parse("S'")), "dual(S) is S'")
check(sp.parse("Sp").size == 7, "Sp alias for S'")
check(len(sp.parse("R").relations()) == 33, "R strict pairs")

# Level sums and families.
check(sp.sigma(4, 2) == 10 and sp.sigma(2, 2) == 3, "sigma values")
check(sp.binomial(6, 3) == 20, "binomial")
mid = sp.Family.middle_levels(4, 2)
check(len(mid) == 10, "middle levels size")
check(frac(sp.double_lubell_sum(mid)) == 2, "double-chain average equals m")
check(frac(sp.chain_lubell_sum(sp.Family(3, [0, 7]))) == 2, "chain sum counts full chains")
check(mid.is_free(sp.parse("B")), "middle levels avoid the butterfly")
comp = mid.complements()
check(len(comp) == 10 and comp.n == 4, "complement family")
parsed = sp.Family.parse("family 3\n{}\n{1,3}\n")
check(parsed.members == [0, 5], "family file parsing")
check("{1,3}" in parsed.render(), "family rendering")

# Double chains and the counting identity.
dc = sp.double_chain([2, 3, 1, 4])
check(dc["primary"] == [0, 2, 6, 7, 15], "primary chain of 2314")
check(dc["secondary"] == [4, 3, 14], "secondary sets of 2314")
check(sp.count_containing(0b001, 3) == 4, "closed-form count 2*1!*2!")
check(sp.count_containing(0, 3) == 6, "empty set lies on every chain")
audit = sp.audit_double_chains(4, jobs=2)
check(audit["verdict"] == "pass" and audit["value"] == "16/16 subset counts match", "audit")

# Exact La and its witness.
la3 = sp.la_exact(3, sp.parse("B"))
check(la3["exact"] and la3["value"] == 6, "La(3, B) = 6")
wit = sp.Family(3, la3["witness"])
check(wit.is_free(sp.parse("B")), "witness re-validates")
la4 = sp.la_exact(4, sp.parse("D3"))
check(la4["exact"] and la4["value"] == 14, "La(4, D3) = 14")
cut = sp.la_exact(4, sp.parse("B"), budget=3)
check(not cut["exact"] and cut["best"] == 10 and cut["upper"] == 16, "budget cut bounds")

# Bounds.
bound, kind = sp.double_chain_bound(sp.parse("B"), 4)
check(frac(bound) == 10 and kind == "sharp-sigma", "sharp bound at n=4")
check(sp.path_embedding_bound(sp.parse("B"), 4) == 14, "path bound at n=4")
check(sp.e_composition_bound(p1) == 13, "composed e bound")

# Window condition and level scans.
wc = sp.window_condition(sp.parse("B"), 2)
check(wc["verdict"] == "pass", "window condition at b(B)")
wc = sp.window_condition(sp.parse("B"), (3, 2))
check(wc["verdict"] == "fail" and wc["witness_kind"] == "window-subset", "refuted at 3/2")
scan = sp.e_lower_scan(sp.parse("D3"), 3, 7, jobs=2)
check(scan["verdict"] == "pass", "lower scan for the diamond")
found = sp.e_upper_witness(sp.parse("D3"), 4, 4)
check(found is not None and found[0] == 3, "upper witness for the diamond")

# Embedding search and verification certificates.
emb = sp.embeds_weak(sp.parse("E + E"), sp.parse("D3"))
check(emb is not None and len(emb) == 2, "chain embeds in the diamond")
check(sp.embeds_weak(sp.parse("Q"), sp.parse("B")) is None, "Q does not fit in B")
cert = sp.verify_sharp_bound(sp.parse("B"), 4)
check(cert["verdict"] == "pass" and cert["value"] == "10", "verify B at n=4")
check("claim=verify" in cert["rendered"], "rendered certificate")
cert = sp.verify_sharp_bound(sp.parse("B + B"), 6)
check(cert["verdict"] == "property-pass", "property pathway at n=6")

print(f"smoke test: {checks} checks passed")
