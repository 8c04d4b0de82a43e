"""Print 50-digit reference values frozen into the Rust tests."""
from mpmath import mp, mpf, sinh, cosh, exp, log, pi, acosh, quad, inf

mp.dps = 50


def bx(r):
    return 48 / pi + 4 / (3 * pi * sinh(r / 4) ** 2)


def tail_terms(r, delta):
    s = sinh(r / 4) ** 2
    t2 = exp(-2 * delta) * sinh(r / 2) * sinh(delta) / s
    integral = quad(lambda p: exp(-2 * p) * sinh(p + r / 2), [delta, inf])
    return t2, integral / (2 * s), integral


print("bx")
for r in [log(3), mpf(2), mpf(4), mpf(10), mpf(50)]:
    print(f"  r={mp.nstr(r, 20)}  {mp.nstr(bx(r), 30)}")
print("48/pi", mp.nstr(48 / pi, 30))
t2, t3, integral = tail_terms(mpf(2), mpf("1.5"))
print("tail r=2 delta=1.5", mp.nstr(t2, 30), mp.nstr(t3, 30), mp.nstr(integral, 30))
ln2 = log(2)
pw = 4 / (3 * pi) * (1 + 2 * exp(-2 * ln2) / cosh(ln2) ** 2 + 2 * exp(-4 * ln2) / cosh(2 * ln2) ** 2)
lo = 16 / (3 * pi) * (1 + 2 * exp(-4 * ln2) + 2 * exp(-8 * ln2))
print("cyclic r=3 pointwise", mp.nstr(pw, 30), "looser", mp.nstr(lo, 30))
print("thm32 d=2 g=2 vol=4pi B=16", mp.nstr(4 * (4 * pi * 16 / 2) ** 2, 30))
print("bolza systole", mp.nstr(2 * acosh(1 + mp.sqrt(2)), 30))
