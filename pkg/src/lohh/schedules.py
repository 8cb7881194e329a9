"""Sigma schedules for ARG and the symbolic tau forms used by GRG baselines.

The c* schedules are calibrated so that sigma(n = 10^3) = 4: c* = 4/f(10^3)
where f is the uncalibrated shape.  Resolved values are clamped below at 1.
"""

import math
import re

SIGMA_SCHEDULES = (
    "const",
    "sqrt_n_over_ln_n",
    "cstar_ln4_n",
    "cstar_sqrt_n_over_ln_n",
    "cstar_sqrt_n_over_ln_n_half",
    "cstar_sqrt_n",
)

_CAL_N = 1000.0
_CAL_SIGMA = 4.0

_SHAPES = {
    "sqrt_n_over_ln_n": lambda n: math.sqrt(n) / math.log(n),
    "cstar_ln4_n": lambda n: math.log(n) ** 4,
    "cstar_sqrt_n_over_ln_n": lambda n: math.sqrt(n) / math.log(n),
    "cstar_sqrt_n_over_ln_n_half": lambda n: math.sqrt(n / math.log(n)),
    "cstar_sqrt_n": lambda n: math.sqrt(n),
}


def cstar(schedule: str) -> float:
    """Calibration constant for the schedule (1.0 for uncalibrated ones)."""
    if schedule not in SIGMA_SCHEDULES:
        raise ValueError(f"unknown sigma schedule: {schedule!r}")
    if not schedule.startswith("cstar_"):
        return 1.0
    return _CAL_SIGMA / _SHAPES[schedule](_CAL_N)


def resolve_sigma(schedule: str, n: int, const_value=None) -> float:
    """Sigma value for problem size n under the named schedule."""
    if schedule not in SIGMA_SCHEDULES:
        raise ValueError(f"unknown sigma schedule: {schedule!r}")
    if schedule == "const":
        if const_value is None:
            raise ValueError("const sigma schedule requires a value")
        sigma = float(const_value)
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return sigma
    if n < 3:
        raise ValueError(f"sigma schedules need n >= 3, got {n}")
    sigma = cstar(schedule) * _SHAPES[schedule](n)
    return max(sigma, 1.0)


_TAU_PATTERN = re.compile(r"^(\d+(?:\.\d+)?)?(n)?(lnn)?$")


def parse_tau(expr, n: int) -> float:
    """Parse a GRG learning period: a number, 'inf', or c/cn/cnlnn forms.

    Accepted strings after stripping spaces and '*': '250', 'inf', '2n',
    '0.6nlnn', 'nlnn'.  The symbolic forms follow the paper-style baselines
    tau = c * n * ln n.
    """
    if isinstance(expr, (int, float)):
        value = float(expr)
    else:
        text = str(expr).strip().lower().replace(" ", "").replace("*", "")
        if text in ("inf", "infinity"):
            return math.inf
        match = _TAU_PATTERN.match(text)
        if not match or not any(match.groups()):
            raise ValueError(f"cannot parse tau expression: {expr!r}")
        coef, has_n, has_lnn = match.groups()
        value = float(coef) if coef else 1.0
        if has_n:
            value *= n
        if has_lnn:
            if not has_n:
                raise ValueError(f"cannot parse tau expression: {expr!r}")
            value *= math.log(n)
    if not value > 0:
        raise ValueError(f"tau must be positive, got {value}")
    return value
