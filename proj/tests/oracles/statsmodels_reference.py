"""Reference values frozen into tests/unit. Rerun to regenerate.

Series are closed-form so the C++ tests rebuild them exactly.
"""
import numpy as np
from statsmodels.tsa.stattools import adfuller, coint
from statsmodels.tsa.adfvalues import mackinnonp, mackinnoncrit
from statsmodels.tsa.api import VAR


def shocks(n, a=1.3, b=0.7):
    t = np.arange(1, n + 1, dtype=float)
    return np.sin(a * t) + 0.5 * np.cos(b * t * t)


def walk(n):
    return np.concatenate([[0.0], np.cumsum(shocks(n - 1))])


def ar(n, phi):
    e = shocks(n, 0.9, 0.31)
    y = np.zeros(n)
    for i in range(1, n):
        y[i] = phi * y[i - 1] + e[i]
    return y


def show(label, v):
    print(f"{label} = {v!r}")


y = walk(120)
for reg, lag in [("c", 2), ("ct", 1), ("n", 0)]:
    r = adfuller(y, maxlag=lag, regression=reg, autolag=None)
    show(f"adf walk120 {reg} lag{lag} stat,p,nobs", (r[0], r[1], r[3]))
for reg in ["c", "ct"]:
    r = adfuller(y, maxlag=6, regression=reg, autolag="BIC")
    show(f"adf walk120 {reg} BIC max6 stat,p,lag,nobs", (r[0], r[1], r[2], r[3]))
    r = adfuller(y, maxlag=6, regression=reg, autolag="AIC")
    show(f"adf walk120 {reg} AIC max6 stat,p,lag,nobs", (r[0], r[1], r[2], r[3]))

z = ar(150, 0.5)
r = adfuller(z, maxlag=1, regression="c", autolag=None)
show("adf ar150 c lag1 stat,p", (r[0], r[1]))

x = walk(100)
yy = 0.8 * x + 2.0 + 0.3 * shocks(100, 2.1, 0.13)
r = coint(yy, x, trend="c", autolag="bic")
show("coint c bic stat,p", (r[0], r[1]))
x2 = walk(100)[::-1].copy()
r = coint(yy, np.column_stack([x, x2]), trend="c", autolag="bic")
show("coint c bic 2 regressors stat,p", (r[0], r[1]))

show("mackinnonp(-2.5,'ct',2)", mackinnonp(-2.5, "ct", 2))
show("mackinnonp(-1.5,'c',6)", mackinnonp(-1.5, "c", 6))
show("mackinnoncrit(3,'ct',100)", list(mackinnoncrit(3, "ct", 100)))

# VAR(1) on two deterministic series.
Y = np.column_stack([ar(80, 0.6), ar(80, 0.2) + 0.3 * shocks(80, 1.7, 0.05)])
res = VAR(Y).fit(1, trend="c")
show("var1 params (rows: const, y1(-1), y2(-1))", res.params.tolist())
