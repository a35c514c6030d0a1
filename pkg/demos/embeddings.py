"""Embedding decisions with audited certificates.

The second pair is the one where the worked example and the counting
conditions disagree: the tool reports what the conditions give.
"""

from soficlab.corpus import shift
from soficlab.decide import decide_factorizable, decide_s_factorizable
from soficlab.verify import audit_verdict

pairs = [("point0", "golden_even"), ("golden_even", "even"), ("orbit100", "even")]
for z, y in pairs:
    Z, Y = shift(z), shift(y)
    s = decide_s_factorizable(Z, Y, 8)
    f = decide_factorizable(Z, Y, 8)
    print(f"{z} -> {y}")
    print(f"  S-factorizable: {s.verdict:7s} audit ok: {audit_verdict(s, Z, 's-fact', Y)['ok']}")
    if s.witness:
        print("    witness:", s.witness)
    print(f"  factorizable:   {f.verdict:7s} audit ok: {audit_verdict(f, Z, 'factorizable', Y)['ok']}")
