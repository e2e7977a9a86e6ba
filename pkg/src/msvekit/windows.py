"""
Lag windows and truncation rules.

A lag window is an even weight function on the integers with w(0) = 1,
|w(s)| <= 1 and w(s) = 0 once |s| >= b_n. The catalog:

==================  ==========================================  ==============
name                w(k) for |k| < b_n                          params
==================  ==========================================  ==============
truncated           1                                           -
bartlett            1 - |k| / b_n  (modified Bartlett)          -
parzen              1 - |k|^q / b_n^q                           q (int >= 1)
blackman-tukey      1 - 2a + 2a cos(pi |k| / b_n)               a in (0, 1/2]
tukey-hanning       blackman-tukey with a = 1/4                 -
scaled-bartlett     1 - eta |k| / b_n                           eta > 0, != 1
==================  ==========================================  ==============

First differences ``delta1(k) = w(k-1) - w(k)`` are evaluated from closed
forms (no subtraction of nearly equal weights); second differences are
``delta2(k) = delta1(k) - delta1(k+1)``.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

__all__ = [
    "LagWindow",
    "TruncationRule",
    "WINDOW_NAMES",
    "make_window",
    "parse_window",
    "delta1",
    "delta2",
    "check_condition1",
    "condition_diagnostics",
    "window_identity_check",
    "catalog",
]

WINDOW_NAMES = (
    "truncated",
    "bartlett",
    "parzen",
    "blackman-tukey",
    "tukey-hanning",
    "scaled-bartlett",
)

_ALIASES = {
    "simple-truncation": "truncated",
    "truncation": "truncated",
    "modified-bartlett": "bartlett",
    "tukey": "tukey-hanning",
    "hanning": "tukey-hanning",
    "scaled": "scaled-bartlett",
    "scale-parameter-bartlett": "scaled-bartlett",
}


@dataclass(frozen=True)
class LagWindow:
    """A named lag window; evaluate with :meth:`weights` or :meth:`__call__`."""

    name: str
    params: dict = field(default_factory=dict)

    @property
    def label(self):
        if self.name == "blackman-tukey" and self.params.get("a") == 0.25:
            return "tukey-hanning"
        if not self.params:
            return self.name
        extra = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name},{extra}"

    def __call__(self, s, b_n):
        return float(self.weights(np.array([s]), b_n)[0])

    def weights(self, s, b_n):
        """Weights at integer lags ``s`` (array) for truncation point ``b_n``."""
        b_n = _check_bn(b_n)
        k = np.abs(np.asarray(s, dtype=np.int64))
        inside = k < b_n
        x = k.astype(float) / b_n
        name = self.name
        if name == "truncated":
            w = np.ones_like(x)
        elif name == "bartlett":
            w = 1.0 - x
        elif name == "parzen":
            q = self.params["q"]
            w = 1.0 - k.astype(float) ** q / float(b_n) ** q
        elif name == "blackman-tukey":
            a = self.params["a"]
            w = 1.0 - 2.0 * a + 2.0 * a * np.cos(np.pi * x)
        elif name == "scaled-bartlett":
            w = 1.0 - self.params["eta"] * x
        else:  # pragma: no cover - guarded by make_window
            raise PreconditionError(f"unknown window {name!r}")
        return np.where(inside, w, 0.0)

    def delta1(self, k, b_n):
        """Closed-form ``w(k-1) - w(k)`` for integer ``k`` (array), any k >= 1."""
        b_n = _check_bn(b_n)
        k = np.asarray(k, dtype=np.int64)
        kf = k.astype(float)
        name = self.name
        if name == "truncated":
            interior = np.zeros_like(kf)
        elif name == "bartlett":
            interior = np.full_like(kf, 1.0 / b_n)
        elif name == "parzen":
            q = self.params["q"]
            # k^q - (k-1)^q is exact in integers for moderate q
            num = np.array([float(int(v) ** q - (int(v) - 1) ** q) for v in k.ravel()])
            interior = num.reshape(kf.shape) / float(b_n) ** q
        elif name == "blackman-tukey":
            a = self.params["a"]
            h = np.pi / (2.0 * b_n)
            interior = 4.0 * a * np.sin(h * (2.0 * kf - 1.0)) * np.sin(h)
        elif name == "scaled-bartlett":
            interior = np.full_like(kf, self.params["eta"] / b_n)
        else:  # pragma: no cover
            raise PreconditionError(f"unknown window {name!r}")
        # k == b_n: w(b_n - 1) - 0; k > b_n: 0 - 0
        edge = self.weights(k - 1, b_n)
        return np.where(k < b_n, interior, np.where(k == b_n, edge, 0.0))

    def delta2(self, k, b_n):
        """``w(k-1) - 2 w(k) + w(k+1)`` as ``delta1(k) - delta1(k+1)``."""
        k = np.asarray(k, dtype=np.int64)
        return self.delta1(k, b_n) - self.delta1(k + 1, b_n)


def _check_bn(b_n):
    if int(b_n) != b_n or b_n < 1:
        raise PreconditionError(f"truncation point must be a positive integer, got {b_n}")
    return int(b_n)


def make_window(name, **params):
    """Build a cataloged lag window, validating its parameters."""
    key = str(name).strip().lower().replace("_", "-").replace(" ", "-")
    key = _ALIASES.get(key, key)
    if key not in WINDOW_NAMES:
        raise PreconditionError(f"unknown lag window {name!r}; choose from {WINDOW_NAMES}")

    allowed = {"parzen": {"q"}, "blackman-tukey": {"a"}, "scaled-bartlett": {"eta"}}.get(key, set())
    unknown = set(params) - allowed
    if unknown:
        raise PreconditionError(f"window {key!r} takes no parameter(s) {sorted(unknown)}")

    if key == "tukey-hanning":
        return LagWindow("blackman-tukey", {"a": 0.25})
    if key == "parzen":
        q = params.get("q", 1)
        if float(q) != int(float(q)) or int(float(q)) < 1:
            raise PreconditionError(f"parzen q must be a positive integer, got {q}")
        q = int(float(q))
        if q == 1:
            return LagWindow("bartlett")
        return LagWindow("parzen", {"q": q})
    if key == "blackman-tukey":
        a = float(params.get("a", 0.25))
        # a > 1/2 would give |w| > 1 near b_n
        if not 0.0 < a <= 0.5:
            raise PreconditionError(f"blackman-tukey a must lie in (0, 1/2], got {a}")
        return LagWindow("blackman-tukey", {"a": a})
    if key == "scaled-bartlett":
        eta = float(params.get("eta", 2.0))
        if not eta > 0.0 or eta == 1.0:
            raise PreconditionError(f"scaled-bartlett eta must be positive and != 1, got {eta}")
        return LagWindow("scaled-bartlett", {"eta": eta})
    return LagWindow(key)


def parse_window(text):
    """Parse ``"name,k=v,..."`` (optionally ``"window=name,..."``) into a window."""
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise PreconditionError("empty window description")
    head, rest = parts[0], parts[1:]
    if head.startswith("window="):
        head = head[len("window="):]
    params = {}
    for item in rest:
        if "=" not in item:
            raise PreconditionError(f"window parameter {item!r} is not key=value")
        k, v = item.split("=", 1)
        try:
            params[k.strip()] = float(v)
        except ValueError:
            raise PreconditionError(f"window parameter {k!r} has non-numeric value {v!r}") from None
    return make_window(head, **params)


def catalog():
    """One representative of every window family, as used by the tests."""
    return [
        make_window("truncated"),
        make_window("bartlett"),
        make_window("parzen", q=2),
        make_window("parzen", q=3),
        make_window("tukey-hanning"),
        make_window("blackman-tukey", a=0.1),
        make_window("scaled-bartlett", eta=2.0),
        make_window("scaled-bartlett", eta=0.5),
    ]


def _check_k(k, b_n):
    if not 1 <= k <= b_n:
        raise PreconditionError(f"lag k={k} outside 1..b_n={b_n}")


def delta1(w, k, b_n):
    """First difference ``w(k-1) - w(k)`` for 1 <= k <= b_n."""
    _check_k(k, b_n)
    return float(w.delta1(np.array([k]), b_n)[0])


def delta2(w, k, b_n):
    """Second difference ``w(k-1) - 2w(k) + w(k+1)`` for 1 <= k <= b_n."""
    _check_k(k, b_n)
    return float(w.delta2(np.array([k]), b_n)[0])


def check_condition1(w, b_n, atol=1e-12):
    """Raise unless ``w`` is a valid lag window at truncation point ``b_n``.

    Checks w(0) = 1, |w(s)| <= 1 and w(s) = 0 for |s| >= b_n on -(b_n+1)..b_n+1.
    Evenness holds by construction (weights depend on |s| only).
    """
    s = np.arange(-(b_n + 1), b_n + 2)
    ws = w.weights(s, b_n)
    if abs(w(0, b_n) - 1.0) > atol:
        raise PreconditionError(f"{w.label}: w(0) != 1")
    if np.any(np.abs(ws) > 1.0 + atol):
        raise PreconditionError(f"{w.label}: |w(s)| exceeds 1 at b_n={b_n}")
    if np.any(ws[np.abs(s) >= b_n] != 0.0):
        raise PreconditionError(f"{w.label}: nonzero weight beyond b_n={b_n}")


@dataclass(frozen=True)
class TruncationRule:
    """``b_n = floor(n ** nu)``.

    Float round-off in ``n ** nu`` is guarded so that exact powers land on the
    integer (``1000 ** (1/3)`` gives 10, not 9).
    """

    nu: float = 1.0 / 3.0
    kind: str = "power"

    def __post_init__(self):
        if self.kind != "power":
            raise PreconditionError(f"unsupported truncation rule {self.kind!r}")
        if not 0.0 < self.nu < 1.0:
            raise PreconditionError(f"nu must lie in (0, 1), got {self.nu}")
        if self.nu >= 0.5:
            warnings.warn(
                f"nu={self.nu} >= 1/2: the smoothness-based consistency criteria need 0 < nu < 1/2",
                stacklevel=3,
            )

    def __call__(self, n):
        return self.bandwidth(n)

    def bandwidth(self, n):
        if n < 1:
            raise PreconditionError(f"n must be positive, got {n}")
        x = float(n) ** self.nu
        r = round(x)
        b = r if abs(x - r) <= 1e-9 * max(1.0, x) else math.floor(x)
        return max(int(b), 1)


# a sequence "vanishes" on the grid if it falls at least like n^MIN_DECAY
MIN_DECAY = 0.1


def _trend_ok(values, ns, single_max=0.05):
    v = np.asarray(values, dtype=float)
    if v.size == 1:
        return bool(v[0] < single_max)
    if v[-1] == 0.0:
        return bool(np.all(np.diff(v) <= 0))
    if not np.all(np.diff(v) < 0):
        return False
    slope = math.log(v[-1] / v[0]) / math.log(ns[-1] / ns[0])
    return bool(slope <= -MIN_DECAY)


def condition_diagnostics(w, rule, n_grid, psi_lambda=None):
    """Evaluate the window/truncation consistency quantities over ``n_grid``.

    For each n with b = rule(n) the report lists

    * ``delta1_moment``: b/n * sum_k k |delta1(k)|  (must vanish)
    * ``delta2_abs_sum``: sum_k |delta2(k)|          (must vanish)
    * ``b_log_n_over_n``: b log(n) / n               (must vanish)

    and, when ``psi_lambda`` is given, the terms involving
    psi(n) = n^(1/2 - lambda):

    * ``psi_b_log``: b psi^2 log(n) (sum |delta2|)^2
    * ``psi_delta2``: psi^2 sum |delta2|
    * ``psi_over_b``: psi / b

    A verdict per sequence is a trend heuristic: strictly decreasing across
    the grid, with log-log slope between the end points at most
    ``-MIN_DECAY`` (a one-point grid just asks for a value below 0.05).
    Limits cannot be certified from a finite grid, so the raw sequences are
    always returned.
    """
    ns = [int(n) for n in n_grid]
    if not ns:
        raise PreconditionError("n_grid is empty")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise PreconditionError("n_grid must be strictly increasing")
    rows = []
    for n in ns:
        b = rule(n)
        if not n > 2 * b:
            raise PreconditionError(f"n={n} violates n > 2 b_n (b_n={b})")
        k = np.arange(1, b + 1)
        d1 = np.abs(w.delta1(k, b))
        d2sum = float(np.sum(np.abs(w.delta2(k, b))))
        row = {
            "n": n,
            "b_n": b,
            "delta1_moment": float(b / n * np.sum(k * d1)),
            "delta2_abs_sum": d2sum,
            "b_log_n_over_n": b * math.log(n) / n,
        }
        if psi_lambda is not None:
            psi = float(n) ** (0.5 - psi_lambda)
            row["psi_b_log"] = b * psi ** 2 * math.log(n) * d2sum ** 2
            row["psi_delta2"] = psi ** 2 * d2sum
            row["psi_over_b"] = psi / b
        rows.append(row)

    keys = [k for k in rows[0] if k not in ("n", "b_n")]
    verdicts = {k: _trend_ok([r[k] for r in rows], ns) for k in keys}
    return {
        "window": w.label,
        "nu": rule.nu,
        "psi_lambda": psi_lambda,
        "rows": rows,
        "verdicts": verdicts,
        "pass": all(verdicts[k] for k in ("delta1_moment", "delta2_abs_sum", "b_log_n_over_n")),
    }


def window_identity_check(w, b_n, atol=1e-12):
    """Check the three summation identities linking w, delta1 and delta2.

    (i)   delta1(s) = sum_{k=s}^{b_n} delta2(k)          for s = 1..b_n
    (ii)  sum_{k=s+1}^{b_n} delta1(k) = w(s)              for s = 0..b_n
    (iii) sum_{k=1}^{b_n} delta1(k) = 1

    Returns a tuple of three booleans.
    """
    b_n = _check_bn(b_n)
    k = np.arange(1, b_n + 1)
    d1 = w.delta1(k, b_n)
    d2 = w.delta2(k, b_n)
    # tail sums: tail[j] = sum_{k=j+1}^{b_n}
    tail_d2 = np.cumsum(d2[::-1])[::-1]
    ok1 = bool(np.all(np.abs(d1 - tail_d2) <= atol))
    tail_d1 = np.append(np.cumsum(d1[::-1])[::-1], 0.0)
    ws = w.weights(np.arange(0, b_n + 1), b_n)
    ok2 = bool(np.all(np.abs(tail_d1 - ws) <= atol))
    ok3 = bool(abs(np.sum(d1) - 1.0) <= atol)
    return ok1, ok2, ok3
