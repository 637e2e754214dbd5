"""Shift-window planning for windowed CCSK, plus capacity/throughput analytics.

Each user modulates data as a cyclic shift of its spreading waveform, but the
shift is confined to a per-user window.  Interference vanishes exactly when
every pair of shifts keeps a circular distance of at least the guard
``N + T_max`` (basis length plus maximal channel order), which is what
``verify_mui_free`` checks and ``plan_shifts`` constructs:

    user i (1-based):  start_i = i*(N + T_max) + (i-1)*M,  width M

The resulting capacity is ``floor(L*N / (N + T_max + M))`` users.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log2

import numpy as np

from .errors import CapacityError, ParameterError


def _is_pow2(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


@dataclass(frozen=True)
class ShiftWindow:
    """Contiguous circular range of ``width`` shifts starting at ``start``."""

    start: int
    width: int
    circular_length: int

    def __post_init__(self):
        if not 0 <= self.start < self.circular_length:
            raise ParameterError(
                f"window start {self.start} outside [0, {self.circular_length})"
            )
        if not 1 <= self.width <= self.circular_length:
            raise ParameterError("window width must be in [1, circular_length]")

    @property
    def wraps(self) -> bool:
        return self.start + self.width > self.circular_length

    def shifts(self) -> np.ndarray:
        """All shift values of the window, in window order."""
        return (self.start + np.arange(self.width)) % self.circular_length

    def contains(self, shift: int) -> bool:
        return (shift - self.start) % self.circular_length < self.width

    def offset_of(self, shift: int) -> int:
        """Window offset (0-based) of a contained shift."""
        off = (shift - self.start) % self.circular_length
        if off >= self.width:
            raise ParameterError(f"shift {shift} outside window")
        return int(off)


@dataclass(frozen=True)
class MuiCheck:
    """Outcome of a pairwise guard check; truthy when interference-free."""

    ok: bool
    guard: int
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ShiftPlan:
    """Per-user shift windows with guard metadata."""

    windows: tuple
    n: int
    l: int
    t_max: int = 0

    def __post_init__(self):
        if len(self.windows) < 1:
            raise ParameterError("plan needs at least one window")
        widths = {w.width for w in self.windows}
        if len(widths) != 1:
            raise ParameterError("all windows must share one width")
        m = widths.pop()
        if not (_is_pow2(m) and m >= 2):
            raise ParameterError(f"window width {m} must be a power of two >= 2")
        if any(w.circular_length != self.circular_length for w in self.windows):
            raise ParameterError("window circular lengths disagree with L*N")
        object.__setattr__(self, "windows", tuple(self.windows))

    @property
    def circular_length(self) -> int:
        return self.l * self.n

    @property
    def n_users(self) -> int:
        return len(self.windows)

    @property
    def m_order(self) -> int:
        return self.windows[0].width

    @property
    def guard(self) -> int:
        return self.n + self.t_max


def u_max(l: int, n: int, m: int) -> int:
    """Largest number of users supportable at order ``m`` (single-path)."""
    if min(l, n, m) < 1:
        raise ParameterError("arguments must be positive")
    return (l * n) // (n + m)


def m_max(l: int, n: int, u: int) -> int:
    """Largest power-of-two CCSK order for ``u`` users.

    Requires ``L*N/U - N > 1``; the result always admits a feasible plan,
    which is asserted as a cross-check.
    """
    if min(l, n, u) < 1:
        raise ParameterError("arguments must be positive")
    rem = l * n - u * n  # u * (L*N/U - N)
    if rem <= u:
        raise CapacityError(
            f"no window order fits {u} users at L={l}, N={n} "
            f"(L*N/U - N <= 1)"
        )
    power = 1
    while 2 * power * u <= rem:
        power *= 2
    if power < 2:
        raise CapacityError(
            f"no power-of-two order >= 2 fits {u} users at L={l}, N={n}"
        )
    plan = plan_shifts(u, n, l, power, t_max=0)
    assert verify_mui_free(plan).ok
    return power


@dataclass(frozen=True)
class Throughput:
    """Spectral-efficiency figures at full load (bps/Hz)."""

    m_order: int
    per_user: float
    aggregate: float


def throughput(u: int, l: int, n: int, beta: float) -> Throughput:
    """Per-user and aggregated spectral efficiency at the maximal order.

    ``beta`` is the available-spectrum fraction entering the bandwidth
    normalization; efficiency is ``log2(M_max) / (beta * L * N)`` per user.
    """
    if not 0.0 < beta <= 1.0:
        raise ParameterError("beta must lie in (0, 1]")
    order = m_max(l, n, u)
    per_user = log2(order) / (beta * l * n)
    return Throughput(m_order=order, per_user=per_user, aggregate=u * per_user)


def plan_shifts(u: int, n: int, l: int, m: int, t_max: int = 0) -> ShiftPlan:
    """Lay out ``u`` shift windows of width ``m`` with guard ``n + t_max``.

    Single-user plans admit any order up to the full circle (there is no pair
    to protect); multiuser plans are feasible only up to
    ``floor(L*N / (N + T_max + M))`` users and raise ``CapacityError`` beyond
    that, naming the limit.  The returned plan always passes
    ``verify_mui_free``.
    """
    if u < 1:
        raise ParameterError("need at least one user")
    if l < 2:
        raise ParameterError("time-spreading length must be >= 2")
    if not (_is_pow2(m) and m >= 2):
        raise ParameterError(f"order {m} must be a power of two >= 2")
    if t_max < 0:
        raise ParameterError("t_max must be >= 0")
    ln = l * n
    guard = n + t_max
    if u == 1:
        if m > ln:
            raise ParameterError(f"order {m} exceeds the circle length {ln}")
    else:
        cap = ln // (guard + m)
        if u > cap:
            raise CapacityError(
                f"{u} users infeasible at L={l}, N={n}, M={m}, T_max={t_max}; "
                f"U_max = {cap}",
                u_max=cap,
            )
    windows = tuple(
        ShiftWindow(start=(i * guard + (i - 1) * m) % ln, width=m, circular_length=ln)
        for i in range(1, u + 1)
    )
    plan = ShiftPlan(windows=windows, n=n, l=l, t_max=t_max)
    check = verify_mui_free(plan)
    assert check.ok, f"constructed plan violates its own guard: {check.violations}"
    return plan


def verify_mui_free(plan: ShiftPlan) -> MuiCheck:
    """Exhaustively check the pairwise guard condition of a plan.

    For every ordered user pair and every pair of shifts from their windows,
    the circular distance must be at least ``N + T_max``.  Violations are
    reported as ``(i, j, tau_i, tau_j)`` tuples (one witness per window pair,
    1-based user indices).
    """
    guard = plan.guard
    ln = plan.circular_length
    violations = []
    if plan.n_users > 1:
        shift_sets = [w.shifts() for w in plan.windows]
        for i in range(plan.n_users):
            for jj in range(plan.n_users):
                if i == jj:
                    continue
                diff = (shift_sets[i][:, None] - shift_sets[jj][None, :]) % ln
                bad = (diff < guard) | (diff > ln - guard)
                if bad.any():
                    a, b = np.argwhere(bad)[0]
                    violations.append(
                        (i + 1, jj + 1, int(shift_sets[i][a]), int(shift_sets[jj][b]))
                    )
    return MuiCheck(ok=not violations, guard=guard, violations=violations)
