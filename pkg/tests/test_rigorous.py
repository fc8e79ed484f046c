"""The fixed-point certificate helper must itself enclose exact values."""
from fractions import Fraction

from pmcdag.acir import eval_exact, eval_interval_batch, interval_columns
from pmcdag.corpus import brp, bundled
from pmcdag.elim import ALL, reach_probability

from randmodels import random_reach_model, rng_for, valuation
from rigorous import ONE, enclose, inside


def check(store, root, points):
    names = store.parameters
    lo, hi = enclose(store, root, {p: [pt[p] for pt in points] for p in names})
    for pt, l, h in zip(points, lo, hi):
        exact = eval_exact(store, root, pt)
        assert Fraction(l, ONE) <= exact <= Fraction(h, ONE)
        assert h - l < ONE >> 150


def test_dice_and_random_models():
    dice = bundled("dice")
    root = reach_probability(dice, dice.label("six"))
    check(dice.store, root, [{"x": Fraction(k, 37)} for k in range(1, 37)])
    for seed in range(15):
        rng = rng_for(seed)
        m = random_reach_model(rng)
        if not m.parameters or "goal" not in m.labels:
            continue
        for h in ALL:
            root = reach_probability(m, m.label("goal"), h)
            check(m.store, root, [valuation(rng, m.store) for _ in range(4)])


def test_small_brp_certifies_float_intervals():
    m = brp(8, 2, 2)
    root = reach_probability(m, m.label("fail"))
    pts = [(Fraction(i, 10), Fraction(j, 10)) for i in range(1, 10) for j in range(1, 10)]
    cols = [interval_columns([p[k] for p in pts]) for k in range(2)]
    flo, fhi = eval_interval_batch(m.store, root, [c[0] for c in cols], [c[1] for c in cols])
    lo, hi = enclose(m.store, root, {"pK": [p[0] for p in pts], "pL": [p[1] for p in pts]})
    for pt, a, b, c, d in zip(pts, lo, hi, flo, fhi):
        assert inside(a, b, c, d)
        exact = eval_exact(m.store, root, {"pK": pt[0], "pL": pt[1]})
        assert Fraction(c) <= exact <= Fraction(d)
    # an enclosure sticking out is detected
    assert not inside(lo[0] - ONE, hi[0], flo[0], fhi[0])
