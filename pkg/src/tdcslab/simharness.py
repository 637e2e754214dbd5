"""Monte Carlo BER engine, scenario configs, and result emission.

A scenario fixes one system (windowed-shift multiuser design or the
traditional full-range CCSK baseline), a spectrum mark, a load (U, M), a
channel, and an Eb/N0 (and optionally near-far) grid.  ``run_ber_scenario``
measures the bit error rate at user 1's receiver with all users transmitting,
stopping per point at ``min_bit_errors`` or ``max_symbols``.

Determinism and reproducibility
-------------------------------
Every random draw comes from a substream keyed by
``(seed, purpose, Eb/N0 value, chunk index[, user index])`` through
``numpy.random.SeedSequence``.  Consequences:

* identical ``(config, seed)`` reproduce identical records for any worker
  count (chunks are pure functions of their index; the stopping rule walks
  chunks in a fixed serial order);
* runs differing only in user count, near-far factor, or sensing mismatch
  share the victim-relevant draws, so paired comparisons are common-random-
  number comparisons.

The default engine works in the correlation domain: because demodulation is
linear in the received block, the windowed decision statistic equals the sum
of precomputed cross-correlation profiles (gathered at data-dependent shifts)
plus a correlated Gaussian noise term sampled exactly from its distribution.
The ``signal`` engine runs the literal modulate/channel/demodulate pipeline;
both are exposed and tested against each other.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .allocation import ShiftPlan, ShiftWindow, m_max, plan_shifts
from .channel import MultipathProfile, cost207_ra6
from .errors import ParameterError, ScenarioError, TdcsError
from .seqcore import (
    builtin_quadriphase16,
    gen_zadoff_chu,
    kronecker_synthesize,
    periodic_xcorr_fft,
)
from .spectrum import SpectrumMark, mark_from_bands, mismatch_mask
from .waveform import gen_phase_sequence, synth_fmw

SYSTEMS = ("mui_free_tdcs", "traditional_tdcs")
CHANNELS = ("single_path", "multipath")
ENGINES = ("auto", "correlation", "signal")

# default spectrum occupancy: 10 MHz with two unavailable bands
DEFAULT_BANDWIDTH_MHZ = 10.0
DEFAULT_UNAVAILABLE_MHZ = ((2.5, 3.75), (6.25, 7.5))

# substream purposes
_BITS, _TAPS, _NOISE, _GAINS = 1, 2, 3, 4
_FMW, _MISMATCH = 9, 13

# windows at most this wide sample window noise through a Cholesky factor;
# wider ones draw the full profile in the frequency domain
_CHOL_LIMIT = 256


@dataclass(frozen=True)
class ScenarioConfig:
    """Inputs of one BER scenario (see module docstring for semantics)."""

    system: str = "mui_free_tdcs"
    n: int = 64
    l: int = 16
    m: int | str = 64                 # CCSK order, or "full"
    u: int = 1
    nf_db: tuple = (10.0,)
    channel: str = "single_path"
    profile: str = "cost207_ra6"
    phase_model: str = "uniform-phase"
    ebn0_db: tuple = (0.0, 2.0, 4.0, 6.0, 8.0)
    eta: float | None = None          # receiver-side sensing mismatch
    mismatch_seed: int | None = None
    seed: int = 42
    min_bit_errors: int = 100
    max_symbols: int = 2_000_000
    bandwidth_mhz: float = DEFAULT_BANDWIDTH_MHZ
    unavailable_mhz: tuple = DEFAULT_UNAVAILABLE_MHZ
    mark_string: str | None = None
    t_g: int | None = None            # cyclic prefix; None = block/4 (multipath)
    measure_all_users: bool = False
    engine: str = "auto"
    chunk_symbols: int = 8192
    scenario_id: str = "scenario"

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ScenarioError(f"unknown system {self.system!r}")
        if self.channel not in CHANNELS:
            raise ScenarioError(f"unknown channel {self.channel!r}")
        if self.engine not in ENGINES:
            raise ScenarioError(f"unknown engine {self.engine!r}")
        if self.profile != "cost207_ra6":
            raise ScenarioError(f"unknown multipath profile {self.profile!r}")
        if self.u < 1:
            raise ScenarioError("u must be >= 1")
        if self.min_bit_errors < 1 or self.max_symbols < 1 or self.chunk_symbols < 1:
            raise ScenarioError("stopping-rule fields must be positive")
        if self.eta is not None and not 0.0 < self.eta <= 1.0:
            raise ScenarioError("eta must lie in (0, 1]")
        if isinstance(self.m, str) and self.m != "full":
            raise ScenarioError(f"m must be an integer or 'full', got {self.m!r}")
        object.__setattr__(self, "nf_db", tuple(float(x) for x in self.nf_db))
        object.__setattr__(self, "ebn0_db", tuple(float(x) for x in self.ebn0_db))
        object.__setattr__(
            self,
            "unavailable_mhz",
            tuple((float(a), float(b)) for a, b in self.unavailable_mhz),
        )


# ---------------------------------------------------------------------------
# scenario file format: line-oriented "key = value", '#' starts a comment
# ---------------------------------------------------------------------------

_LIST_KEYS = {"ebn0_db", "nf_db"}
_INT_KEYS = {"n", "l", "u", "seed", "min_bit_errors", "max_symbols", "t_g",
             "mismatch_seed", "chunk_symbols"}
_FLOAT_KEYS = {"eta", "bandwidth_mhz"}
_BOOL_KEYS = {"measure_all_users"}
_STR_KEYS = {"system", "channel", "profile", "phase_model", "engine",
             "scenario_id", "mark_string"}


def parse_scenario(text: str, scenario_id: str | None = None) -> ScenarioConfig:
    """Parse the line-oriented key=value scenario format."""
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        try:
            if key in _LIST_KEYS:
                fields[key] = tuple(float(v) for v in value.split(","))
            elif key in _INT_KEYS:
                fields[key] = int(value)
            elif key in _FLOAT_KEYS:
                fields[key] = float(value)
            elif key in _BOOL_KEYS:
                fields[key] = value.lower() in ("1", "true", "yes")
            elif key == "m":
                fields[key] = value if value == "full" else int(value)
            elif key == "unavailable_mhz":
                bands = []
                if value.strip():
                    for chunk in value.split(","):
                        lo, hi = chunk.split(":")
                        bands.append((float(lo), float(hi)))
                fields[key] = tuple(bands)
            elif key in _STR_KEYS:
                fields[key] = value
            else:
                raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    if scenario_id is not None:
        fields.setdefault("scenario_id", scenario_id)
    try:
        return ScenarioConfig(**fields)
    except TypeError as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path) -> ScenarioConfig:
    with open(path) as fh:
        text = fh.read()
    stem = str(path).rsplit("/", 1)[-1]
    stem = stem.rsplit(".", 1)[0]
    return parse_scenario(text, scenario_id=stem)


def scenario_to_text(cfg: ScenarioConfig) -> str:
    """Canonical serialization (round-trips through ``parse_scenario``)."""
    lines = [
        f"scenario_id = {cfg.scenario_id}",
        f"system = {cfg.system}",
        f"n = {cfg.n}",
        f"l = {cfg.l}",
        f"m = {cfg.m}",
        f"u = {cfg.u}",
        "nf_db = " + ", ".join(repr(v) for v in cfg.nf_db),
        f"channel = {cfg.channel}",
        f"profile = {cfg.profile}",
        f"phase_model = {cfg.phase_model}",
        "ebn0_db = " + ", ".join(repr(v) for v in cfg.ebn0_db),
        f"seed = {cfg.seed}",
        f"min_bit_errors = {cfg.min_bit_errors}",
        f"max_symbols = {cfg.max_symbols}",
        f"bandwidth_mhz = {cfg.bandwidth_mhz!r}",
        "unavailable_mhz = "
        + ", ".join(f"{a!r}:{b!r}" for a, b in cfg.unavailable_mhz),
        f"engine = {cfg.engine}",
        f"chunk_symbols = {cfg.chunk_symbols}",
    ]
    if cfg.eta is not None:
        lines.append(f"eta = {cfg.eta!r}")
    if cfg.mismatch_seed is not None:
        lines.append(f"mismatch_seed = {cfg.mismatch_seed}")
    if cfg.mark_string is not None:
        lines.append(f"mark_string = {cfg.mark_string}")
    if cfg.t_g is not None:
        lines.append(f"t_g = {cfg.t_g}")
    if cfg.measure_all_users:
        lines.append("measure_all_users = true")
    return "\n".join(lines) + "\n"


def config_digest(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(scenario_to_text(cfg).encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BerRecord:
    """Error counts for one (Eb/N0, NF) grid point."""

    ebn0_db: float
    nf_db: float
    bits_sent: int
    bit_errors: int
    reached_min_errors: bool
    per_user: tuple = field(default_factory=tuple)  # (user, bits, errors)

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent

    @property
    def ci_halfwidth(self) -> float:
        """95% half-width: normal approximation, floored at 1.96/n."""
        p = self.ber
        n = self.bits_sent
        return max(1.96 * np.sqrt(p * (1.0 - p) / n), 1.96 / n)


# ---------------------------------------------------------------------------
# system construction
# ---------------------------------------------------------------------------

@dataclass
class _System:
    chips: list                     # per-user transmit waveforms
    windows: list                   # per-user ShiftWindow
    m_order: int
    block_len: int
    symbol_energy: float
    mark_tx: SpectrumMark
    mark_rx: SpectrumMark
    user_phase_seeds: list
    plan: ShiftPlan | None
    profile: MultipathProfile | None
    t_g: int

    def reference(self, victim: int) -> np.ndarray:
        """Victim's local reference, rebuilt from the receiver-side mark."""
        if self.mark_rx is self.mark_tx:
            return self.chips[victim]
        phases = gen_phase_sequence(self.user_phase_seeds[victim], self.mark_rx.n)
        basis = synth_fmw(self.mark_rx, phases)
        if self.plan is not None:
            code = _time_code(self.plan.l)
            return kronecker_synthesize(code, basis.samples)
        return basis.samples.copy()


def _time_code(l: int):
    if l == 16:
        return builtin_quadriphase16()
    return gen_zadoff_chu(l, 1)


def _derived_seed(seed: int, purpose: int, index: int) -> int:
    ss = np.random.SeedSequence([int(seed), purpose, int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def build_system(cfg: ScenarioConfig) -> _System:
    """Materialize waveforms, windows, and marks for a scenario."""
    block_len = cfg.l * cfg.n
    traditional = cfg.system == "traditional_tdcs"
    mark_bins = block_len if traditional else cfg.n
    if cfg.mark_string is not None:
        mark_tx = SpectrumMark.from_string(cfg.mark_string)
        if mark_tx.n != mark_bins:
            raise ScenarioError(
                f"mark string has {mark_tx.n} bins, system needs {mark_bins}"
            )
    else:
        mark_tx = mark_from_bands(
            cfg.bandwidth_mhz, cfg.unavailable_mhz, mark_bins
        )
    mark_rx = mark_tx
    if cfg.eta is not None and cfg.eta < 1.0:
        mm_seed = (cfg.mismatch_seed if cfg.mismatch_seed is not None
                   else _derived_seed(cfg.seed, _MISMATCH, 0))
        mark_rx = mismatch_mask(mark_tx, cfg.eta, mm_seed)

    profile = cost207_ra6() if cfg.channel == "multipath" else None
    t_chan = profile.t_max if profile else 0
    t_g = cfg.t_g if cfg.t_g is not None else (block_len // 4 if profile else 0)
    if profile and t_g < profile.t_max:
        raise ScenarioError(
            f"cyclic prefix {t_g} shorter than channel order {profile.t_max}"
        )

    phase_seeds = [_derived_seed(cfg.seed, _FMW, j) for j in range(cfg.u)]
    if traditional:
        if not (cfg.m == "full" or cfg.m == block_len):
            raise ScenarioError(
                "the traditional baseline keys over the full shift range; "
                "set m = full"
            )
        chips = []
        for j in range(cfg.u):
            phases = gen_phase_sequence(phase_seeds[j], block_len)
            chips.append(synth_fmw(mark_tx, phases, user_id=j).samples.copy())
        windows = [ShiftWindow(0, block_len, block_len) for _ in range(cfg.u)]
        return _System(
            chips=chips, windows=windows, m_order=block_len,
            block_len=block_len, symbol_energy=1.0, mark_tx=mark_tx,
            mark_rx=mark_rx, user_phase_seeds=phase_seeds, plan=None,
            profile=profile, t_g=t_g,
        )

    if cfg.m == "full":
        # full loading: the largest power-of-two order; a single user keys
        # over the whole circle (the classic full-range CCSK reference)
        order = block_len if cfg.u == 1 else m_max(cfg.l, cfg.n, cfg.u)
    else:
        order = int(cfg.m)
    plan = plan_shifts(cfg.u, cfg.n, cfg.l, order, t_max=t_chan)
    code = _time_code(cfg.l)
    chips = []
    for j in range(cfg.u):
        phases = gen_phase_sequence(phase_seeds[j], cfg.n)
        basis = synth_fmw(mark_tx, phases, user_id=j, phase_seed=phase_seeds[j])
        chips.append(kronecker_synthesize(code, basis.samples))
    energy = float(np.sum(np.abs(chips[0]) ** 2))
    return _System(
        chips=chips, windows=list(plan.windows), m_order=order,
        block_len=block_len, symbol_energy=energy, mark_tx=mark_tx,
        mark_rx=mark_rx, user_phase_seeds=phase_seeds, plan=plan,
        profile=profile, t_g=t_g,
    )


# ---------------------------------------------------------------------------
# keyed substreams
# ---------------------------------------------------------------------------

def _ebn0_key(ebn0_db: float) -> int:
    if np.isinf(ebn0_db):
        return 2 ** 62
    return int(round(ebn0_db * 1000.0)) + 2 ** 31


def _stream_rng(seed: int, purpose: int, ebn0_key: int, chunk: int,
                user: int | None = None) -> np.random.Generator:
    key = [int(seed), purpose, ebn0_key, int(chunk)]
    if user is not None:
        key.append(int(user))
    return np.random.default_rng(np.random.SeedSequence(key))


def _cgauss(rng: np.random.Generator, shape) -> np.ndarray:
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def _n0(cfg: ScenarioConfig, system: _System, ebn0_db: float) -> float:
    if np.isinf(ebn0_db):
        return 0.0
    k = system.m_order.bit_length() - 1
    return system.symbol_energy / (k * 10.0 ** (ebn0_db / 10.0))


def _pair_key(victim: int, user: int) -> int:
    # receiver/transmitter pair key; the user-1 receiver keeps bare user keys
    # so runs differing only in U or NF share the victim-relevant draws
    return victim * 65536 + user


def _gain_draws(cfg: ScenarioConfig, victim: int, nf_lin: float, size: int,
                ebn0_key: int, chunk: int) -> dict:
    """Per-block complex gains from each transmitter to the victim receiver."""
    gains = {}
    for j in range(cfg.u):
        amp = 1.0 if j == victim else nf_lin
        if cfg.phase_model == "fixed-phase":
            gains[j] = np.full(size, amp, dtype=np.complex128)
            continue
        rng = _stream_rng(cfg.seed, _GAINS, ebn0_key, chunk,
                          user=_pair_key(victim, j))
        if cfg.phase_model == "uniform-phase":
            gains[j] = amp * np.exp(2j * np.pi * rng.random(size))
        elif cfg.phase_model == "rayleigh":
            gains[j] = amp * _cgauss(rng, (size,))
        else:
            raise ScenarioError(f"unknown phase model {cfg.phase_model!r}")
    return gains


def _popcount_table(m_order: int) -> np.ndarray:
    return np.array([bin(x).count("1") for x in range(m_order)], dtype=np.int64)


# ---------------------------------------------------------------------------
# correlation-domain point simulators
# ---------------------------------------------------------------------------

class _PointSim:
    """Per-point simulation context; ``chunk(size, idx)`` is a pure function."""

    def __init__(self, cfg: ScenarioConfig, system: _System, victim: int,
                 ebn0_db: float, nf_db: float):
        self.cfg = cfg
        self.system = system
        self.victim = victim
        self.ebn0_db = ebn0_db
        self.key = _ebn0_key(ebn0_db)
        self.nf_lin = 10.0 ** (nf_db / 20.0)
        self.n0 = _n0(cfg, system, ebn0_db)
        self.ref = system.reference(victim)
        self.window = system.windows[victim]
        self.m = system.m_order
        self.kbits = self.m.bit_length() - 1
        self.pop = _popcount_table(self.m)
        self.ln = system.block_len

    # -- shared helpers ----------------------------------------------------

    def _messages(self, size: int, chunk: int):
        msgs = {}
        for j in range(self.cfg.u):
            rng = _stream_rng(self.cfg.seed, _BITS, self.key, chunk, user=j)
            msgs[j] = rng.integers(0, self.m, size=size)
        return msgs

    def _taps(self, size: int, chunk: int):
        powers = self.system.profile.mean_powers()
        taps = {}
        for j in range(self.cfg.u):
            rng = _stream_rng(self.cfg.seed, _TAPS, self.key, chunk,
                              user=_pair_key(self.victim, j))
            h = _cgauss(rng, (size, powers.size)) * np.sqrt(powers)
            if j != self.victim:
                h = h * self.nf_lin
            taps[j] = h
        return taps

    def _noise_window(self, size: int, chunk: int, offsets: np.ndarray,
                      chol: np.ndarray | None):
        """Exact window slice of the noise correlation profile."""
        if self.n0 == 0.0:
            return 0.0
        rng = _stream_rng(self.cfg.seed, _NOISE, self.key, chunk)
        if chol is not None:
            g = _cgauss(rng, (size, offsets.size))
            return g @ chol.T
        # frequency-domain sampling of the full stationary profile
        g = _cgauss(rng, (size, self.ln)) * np.sqrt(self.ln * self.n0)
        wfull = np.fft.fft(g * np.conj(np.fft.fft(self.ref))[None, :], axis=1) / self.ln
        idx = (self.window.start + offsets) % self.ln
        return wfull[:, idx]

    def _chol(self, offsets: np.ndarray, acf_ref: np.ndarray):
        if self.n0 == 0.0 or offsets.size > _CHOL_LIMIT:
            return None
        cov = self.n0 * acf_ref[(offsets[:, None] - offsets[None, :]) % self.ln]
        jitter = 1e-12 * self.n0 * max(1.0, self.system.symbol_energy)
        return np.linalg.cholesky(cov + jitter * np.eye(offsets.size))


class _SinglePathSim(_PointSim):
    def __init__(self, *args):
        super().__init__(*args)
        self.profiles = [periodic_xcorr_fft(c, self.ref) for c in self.system.chips]
        self.acf_ref = periodic_xcorr_fft(self.ref, self.ref)
        self.offsets = np.arange(self.m)
        self.cholesky = self._chol(self.offsets, self.acf_ref)

    def chunk(self, size: int, chunk_idx: int):
        cfg = self.cfg
        msgs = self._messages(size, chunk_idx)
        gains = _gain_draws(cfg, self.victim, self.nf_lin, size, self.key,
                            chunk_idx)
        stat = np.zeros((size, self.m), dtype=np.complex128)
        w0 = self.window.start
        for j in range(cfg.u):
            tau = (self.system.windows[j].start + msgs[j]) % self.ln
            idx = (w0 + self.offsets[None, :] - tau[:, None]) % self.ln
            stat += gains[j][:, None] * self.profiles[j][idx]
        stat += self._noise_window(size, chunk_idx, self.offsets, self.cholesky)
        dec = np.argmax(np.abs(stat), axis=1)
        sent = msgs[self.victim]
        errors = int(self.pop[np.bitwise_xor(dec, sent)].sum())
        return errors, size


class _RakeSim(_PointSim):
    def __init__(self, *args):
        super().__init__(*args)
        self.t = self.system.profile.t_max
        self.profiles = [periodic_xcorr_fft(c, self.ref) for c in self.system.chips]
        self.acf_ref = periodic_xcorr_fft(self.ref, self.ref)
        self.offsets = np.arange(-self.t, self.m)
        self.cholesky = self._chol(self.offsets, self.acf_ref)

    def chunk(self, size: int, chunk_idx: int):
        cfg = self.cfg
        msgs = self._messages(size, chunk_idx)
        taps = self._taps(size, chunk_idx)
        w0 = self.window.start
        phi = np.zeros((size, self.offsets.size), dtype=np.complex128)
        n_taps = self.t + 1
        for j in range(cfg.u):
            tau = (self.system.windows[j].start + msgs[j]) % self.ln
            for p in range(n_taps):
                idx = (w0 + self.offsets[None, :] - (tau[:, None] - p)) % self.ln
                phi += taps[j][:, p][:, None] * self.profiles[j][idx]
        phi += self._noise_window(size, chunk_idx, self.offsets, self.cholesky)
        z = np.zeros((size, self.m), dtype=np.complex128)
        hv = taps[self.victim]
        for q in range(n_taps):
            z += np.conj(hv[:, q])[:, None] * phi[:, self.t - q:self.t - q + self.m]
        dec = np.argmax(np.abs(z), axis=1)
        errors = int(self.pop[np.bitwise_xor(dec, msgs[self.victim])].sum())
        return errors, size


class _FdeSim(_PointSim):
    """Traditional baseline over multipath: one-tap MMSE, then correlation."""

    def __init__(self, *args):
        super().__init__(*args)
        self.bf = [np.fft.fft(c) for c in self.system.chips]
        self.cref = np.conj(np.fft.fft(self.ref))
        k = np.arange(self.ln)
        n_taps = self.system.profile.t_max + 1
        self.delay_ramp = np.exp(-2j * np.pi * np.outer(np.arange(n_taps), k) / self.ln)
        self.k_grid = k
        n_c = self.system.mark_tx.n_available
        self.snr_bin = None
        if self.n0 > 0.0:
            self.snr_bin = (self.ln / n_c) / (self.ln * self.n0)

    def chunk(self, size: int, chunk_idx: int):
        cfg = self.cfg
        msgs = self._messages(size, chunk_idx)
        taps = self._taps(size, chunk_idx)
        if self.n0 > 0.0:
            rng = _stream_rng(cfg.seed, _NOISE, self.key, chunk_idx)
            r = _cgauss(rng, (size, self.ln)) * np.sqrt(self.ln * self.n0)
        else:
            r = np.zeros((size, self.ln), dtype=np.complex128)
        h_victim_freq = None
        for j in range(cfg.u):
            hf = taps[j] @ self.delay_ramp
            if j == self.victim:
                h_victim_freq = hf
            tau = (self.system.windows[j].start + msgs[j]) % self.ln
            ramp = np.exp(2j * np.pi * np.outer(tau, self.k_grid) / self.ln)
            r += hf * self.bf[j][None, :] * ramp
        snr = self.snr_bin if self.snr_bin is not None else 1e15
        weights = np.conj(h_victim_freq) / (np.abs(h_victim_freq) ** 2 + 1.0 / snr)
        prof = np.fft.fft(r * weights * self.cref[None, :], axis=1) / self.ln
        idx = (self.window.start + np.arange(self.m)) % self.ln
        dec = np.argmax(np.abs(prof[:, idx]), axis=1)
        errors = int(self.pop[np.bitwise_xor(dec, msgs[self.victim])].sum())
        return errors, size


class _SignalSim(_PointSim):
    """Literal modulate -> channel -> demodulate pipeline (batched)."""

    def __init__(self, *args):
        super().__init__(*args)
        self.cref_fft = np.conj(np.fft.fft(self.ref))
        if self.system.profile is not None:
            self.t = self.system.profile.t_max
        else:
            self.t = 0
        if self.system.profile is not None and self.system.plan is None:
            k = np.arange(self.ln)
            self.delay_ramp = np.exp(
                -2j * np.pi * np.outer(np.arange(self.t + 1), k) / self.ln
            )
            n_c = self.system.mark_tx.n_available
            self.snr_bin = ((self.ln / n_c) / (self.ln * self.n0)
                            if self.n0 > 0 else None)

    def _received(self, size: int, chunk_idx: int, msgs, taps):
        cfg = self.cfg
        base = np.arange(self.ln)
        r = np.zeros((size, self.ln), dtype=np.complex128)
        if self.system.profile is None:
            gains = _gain_draws(cfg, self.victim, self.nf_lin, size, self.key,
                                chunk_idx)
            for j in range(cfg.u):
                tau = (self.system.windows[j].start + msgs[j]) % self.ln
                xs = self.system.chips[j][(base[None, :] + tau[:, None]) % self.ln]
                r += gains[j][:, None] * xs
        else:
            for j in range(cfg.u):
                tau = (self.system.windows[j].start + msgs[j]) % self.ln
                xs = self.system.chips[j][(base[None, :] + tau[:, None]) % self.ln]
                # circular-delay sum; equals FIR over the cyclic prefix
                for p in range(self.t + 1):
                    r += taps[j][:, p][:, None] * np.roll(xs, p, axis=1)
        if self.n0 > 0.0:
            rng = _stream_rng(cfg.seed, _NOISE, self.key, chunk_idx)
            r += _cgauss(rng, (size, self.ln)) * np.sqrt(self.n0)
        return r

    def chunk(self, size: int, chunk_idx: int):
        msgs = self._messages(size, chunk_idx)
        taps = self._taps(size, chunk_idx) if self.system.profile else None
        r = self._received(size, chunk_idx, msgs, taps)
        rf = np.fft.fft(r, axis=1)
        if self.system.profile is not None and self.system.plan is None:
            hf = taps[self.victim] @ self.delay_ramp
            snr = self.snr_bin if self.snr_bin is not None else 1e15
            rf = rf * (np.conj(hf) / (np.abs(hf) ** 2 + 1.0 / snr))
        phi = np.fft.fft(rf * self.cref_fft[None, :], axis=1) / self.ln
        shifts = self.window.shifts()
        if self.system.profile is not None and self.system.plan is not None:
            hv = taps[self.victim]
            z = np.zeros((size, self.m), dtype=np.complex128)
            for q in range(self.t + 1):
                z += np.conj(hv[:, q])[:, None] * phi[:, (shifts - q) % self.ln]
            stat = np.abs(z)
        else:
            stat = np.abs(phi[:, shifts])
        dec = np.argmax(stat, axis=1)
        errors = int(self.pop[np.bitwise_xor(dec, msgs[self.victim])].sum())
        return errors, size


def _make_sim(cfg: ScenarioConfig, system: _System, victim: int,
              ebn0_db: float, nf_db: float) -> _PointSim:
    engine = cfg.engine
    if engine == "signal":
        return _SignalSim(cfg, system, victim, ebn0_db, nf_db)
    if system.profile is None:
        return _SinglePathSim(cfg, system, victim, ebn0_db, nf_db)
    if system.plan is not None:
        return _RakeSim(cfg, system, victim, ebn0_db, nf_db)
    return _FdeSim(cfg, system, victim, ebn0_db, nf_db)


# ---------------------------------------------------------------------------
# stopping rule and scenario drivers
# ---------------------------------------------------------------------------

def _chunk_sizes(cfg: ScenarioConfig):
    sizes = []
    remaining = cfg.max_symbols
    while remaining > 0:
        take = min(cfg.chunk_symbols, remaining)
        sizes.append(take)
        remaining -= take
    return sizes


def _run_point(cfg: ScenarioConfig, sim: _PointSim, threads: int):
    """Run chunks until the stopping rule fires.

    Chunks are included in serial order regardless of how many are computed
    concurrently, so results do not depend on the worker count.
    """
    sizes = _chunk_sizes(cfg)
    kbits = sim.kbits
    errors = 0
    symbols = 0
    idx = 0
    width = max(1, threads)
    pool = ThreadPoolExecutor(max_workers=width) if width > 1 else None
    try:
        while idx < len(sizes):
            wave = list(range(idx, min(idx + width, len(sizes))))
            if pool is None:
                outcomes = [sim.chunk(sizes[i], i) for i in wave]
            else:
                outcomes = list(pool.map(lambda i: sim.chunk(sizes[i], i), wave))
            stop = False
            for (err, sym) in outcomes:
                errors += err
                symbols += sym
                if errors >= cfg.min_bit_errors:
                    stop = True
                    break
            if stop:
                break
            idx = wave[-1] + 1
    finally:
        if pool is not None:
            pool.shutdown()
    return kbits * symbols, errors


def run_ber_scenario(cfg: ScenarioConfig, threads: int = 1) -> list:
    """Simulate every (Eb/N0, NF) grid point of a scenario.

    Waveforms are built once; each point draws per-block data, channel, and
    noise from keyed substreams, demodulates user 1 (all users when
    ``measure_all_users``), and counts bit errors under the stopping rule.
    """
    system = build_system(cfg)
    victims = range(cfg.u) if cfg.measure_all_users else (0,)
    records = []
    for nf_db in cfg.nf_db:
        for ebn0_db in cfg.ebn0_db:
            per_user = []
            total_bits = 0
            total_errors = 0
            for victim in victims:
                sim = _make_sim(cfg, system, victim, ebn0_db, nf_db)
                bits, errors = _run_point(cfg, sim, threads)
                per_user.append((victim + 1, bits, errors))
                total_bits += bits
                total_errors += errors
            records.append(
                BerRecord(
                    ebn0_db=ebn0_db,
                    nf_db=nf_db,
                    bits_sent=total_bits,
                    bit_errors=total_errors,
                    reached_min_errors=all(
                        e >= cfg.min_bit_errors for (_, _, e) in per_user
                    ),
                    per_user=tuple(per_user),
                )
            )
    return records


def run_traditional_baseline(cfg: ScenarioConfig, threads: int = 1) -> list:
    """Full-range CCSK baseline run (pseudorandom length-LN waveforms)."""
    if cfg.system != "traditional_tdcs":
        cfg = replace(cfg, system="traditional_tdcs", m="full")
    return run_ber_scenario(cfg, threads=threads)


def run_mismatch_scenario(cfg: ScenarioConfig, threads: int = 1) -> list:
    """Sensing-mismatch run: the victim's reference uses the mismatched mark."""
    if cfg.eta is None:
        raise ScenarioError("mismatch scenario requires eta")
    return run_ber_scenario(cfg, threads=threads)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

CSV_HEADER = "scenario_id,system,U,NF_db,ebn0_db,bits,errors,ber,ci_halfwidth"


def records_to_csv(cfg: ScenarioConfig, records) -> str:
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(
            ",".join(
                [
                    cfg.scenario_id,
                    cfg.system,
                    str(cfg.u),
                    repr(rec.nf_db),
                    repr(rec.ebn0_db),
                    str(rec.bits_sent),
                    str(rec.bit_errors),
                    repr(rec.ber),
                    repr(rec.ci_halfwidth),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def emit_results(records, cfg: ScenarioConfig, out_dir, fmt: str = "csv"):
    """Write the results CSV plus a human-readable run report.

    Returns the written paths.  The CSV body is a pure function of
    ``(config, seed)``.
    """
    import os

    if fmt != "csv":
        raise ParameterError(f"unsupported format {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{cfg.scenario_id}.csv")
    report_path = os.path.join(out_dir, f"{cfg.scenario_id}_report.txt")
    try:
        with open(csv_path, "w") as fh:
            fh.write(records_to_csv(cfg, records))
        with open(report_path, "w") as fh:
            fh.write(render_report(cfg, records))
    except OSError as exc:
        raise TdcsError(f"cannot write results: {exc}") from exc
    return csv_path, report_path


def render_report(cfg: ScenarioConfig, records) -> str:
    out = [
        f"run report: {cfg.scenario_id}",
        f"config sha256: {config_digest(cfg)}",
        f"root seed: {cfg.seed}",
        f"stopping rule: >= {cfg.min_bit_errors} bit errors "
        f"or {cfg.max_symbols} symbols per point",
        "",
        "config:",
    ]
    out.extend("  " + line for line in scenario_to_text(cfg).rstrip().splitlines())
    out.append("")
    out.append("results:")
    for rec in records:
        flag = "" if rec.reached_min_errors else "  [hit max_symbols]"
        out.append(
            f"  NF={rec.nf_db:g} dB  Eb/N0={rec.ebn0_db:g} dB  "
            f"ber={rec.ber:.6e}  ({rec.bit_errors} errors / {rec.bits_sent} bits, "
            f"ci +/-{rec.ci_halfwidth:.2e}){flag}"
        )
    return "\n".join(out) + "\n"
