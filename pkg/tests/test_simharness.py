"""Scenario parsing, Monte Carlo determinism, and engine consistency tests."""

import numpy as np
import pytest

from tdcslab.errors import ScenarioError
from tdcslab.simharness import (
    BerRecord,
    ScenarioConfig,
    build_system,
    config_digest,
    emit_results,
    load_scenario,
    parse_scenario,
    records_to_csv,
    run_ber_scenario,
    run_mismatch_scenario,
    run_traditional_baseline,
    scenario_to_text,
)


def small_cfg(**overrides):
    base = dict(
        system="mui_free_tdcs", n=16, l=8, m=8, u=2,
        ebn0_db=(4.0,), nf_db=(10.0,), max_symbols=20_000,
        chunk_symbols=4096, scenario_id="unit",
    )
    base.update(overrides)
    return ScenarioConfig(**base)


class TestScenarioParsing:
    def test_round_trip(self):
        cfg = small_cfg(eta=0.9, mismatch_seed=5, t_g=32, measure_all_users=True)
        assert parse_scenario(scenario_to_text(cfg)) == cfg

    def test_comments_and_blanks(self):
        cfg = parse_scenario(
            """
            # a scenario
            system = mui_free_tdcs
            n = 16
            l = 8
            m = 8       # order
            u = 2
            ebn0_db = 0, 2
            """
        )
        assert cfg.m == 8 and cfg.ebn0_db == (0.0, 2.0)

    def test_unknown_key(self):
        with pytest.raises(ScenarioError):
            parse_scenario("bogus = 1")

    def test_bad_value(self):
        with pytest.raises(ScenarioError):
            parse_scenario("n = sixteen")

    def test_bad_system(self):
        with pytest.raises(ScenarioError):
            parse_scenario("system = mc_cdma")

    def test_bands_parse(self):
        cfg = parse_scenario("unavailable_mhz = 1.0:2.0, 4.5:5.0")
        assert cfg.unavailable_mhz == ((1.0, 2.0), (4.5, 5.0))

    def test_profile_key(self):
        cfg = parse_scenario("channel = multipath\nprofile = cost207_ra6")
        assert cfg.profile == "cost207_ra6"
        with pytest.raises(ScenarioError):
            parse_scenario("profile = exponential")

    def test_load_scenario_uses_stem(self, tmp_path):
        p = tmp_path / "demo_run.cfg"
        p.write_text("n = 16\nl = 8\nm = 8\n")
        cfg = load_scenario(p)
        assert cfg.scenario_id == "demo_run"

    def test_traditional_requires_full_range(self):
        with pytest.raises(ScenarioError):
            build_system(small_cfg(system="traditional_tdcs", m=8))


class TestNoiselessExactness:
    def test_single_user_all_messages_decode(self):
        cfg = small_cfg(u=1, ebn0_db=(float("inf"),), max_symbols=2048,
                        chunk_symbols=512)
        rec = run_ber_scenario(cfg)[0]
        assert rec.bit_errors == 0
        assert rec.ber == 0.0

    def test_two_users_strong_interferer(self):
        cfg = small_cfg(ebn0_db=(float("inf"),), nf_db=(20.0,),
                        max_symbols=4096, chunk_symbols=1024)
        rec = run_ber_scenario(cfg)[0]
        assert rec.bit_errors == 0

    def test_traditional_single_user_noiseless(self):
        cfg = small_cfg(system="traditional_tdcs", m="full", u=1,
                        ebn0_db=(float("inf"),), max_symbols=512,
                        chunk_symbols=256)
        rec = run_traditional_baseline(cfg)[0]
        assert rec.bit_errors == 0


class TestDeterminism:
    def test_same_config_same_records(self):
        a = run_ber_scenario(small_cfg())
        b = run_ber_scenario(small_cfg())
        assert a == b

    def test_seed_changes_body(self):
        a = run_ber_scenario(small_cfg())
        b = run_ber_scenario(small_cfg(seed=43))
        assert a != b

    def test_worker_count_invariance(self):
        cfg = small_cfg(max_symbols=30_000, chunk_symbols=2048)
        recs1 = run_ber_scenario(cfg, threads=1)
        recs3 = run_ber_scenario(cfg, threads=3)
        assert records_to_csv(cfg, recs1) == records_to_csv(cfg, recs3)

    def test_interferers_do_not_touch_victim_stream(self):
        # exact-zero cross-correlation + keyed substreams: victim counts are
        # identical whatever the load or near-far factor
        r1 = run_ber_scenario(small_cfg(u=1, nf_db=(0.0,)))[0]
        r3 = run_ber_scenario(small_cfg(u=3, nf_db=(16.0,)))[0]
        assert (r1.bit_errors, r1.bits_sent) == (r3.bit_errors, r3.bits_sent)

    def test_multipath_victim_stream_alignment(self):
        kw = dict(channel="multipath", t_g=32, ebn0_db=(6.0,),
                  max_symbols=10_000)
        r1 = run_ber_scenario(small_cfg(u=1, **kw))[0]
        r2 = run_ber_scenario(small_cfg(u=2, **kw))[0]
        assert (r1.bit_errors, r1.bits_sent) == (r2.bit_errors, r2.bits_sent)


class TestStoppingRule:
    def test_min_errors_reached_flag(self):
        cfg = small_cfg(ebn0_db=(0.0,), min_bit_errors=50, max_symbols=50_000)
        rec = run_ber_scenario(cfg)[0]
        assert rec.reached_min_errors
        assert rec.bit_errors >= 50

    def test_max_symbols_cap_flag(self):
        cfg = small_cfg(ebn0_db=(float("inf"),), max_symbols=1024,
                        chunk_symbols=256)
        rec = run_ber_scenario(cfg)[0]
        assert not rec.reached_min_errors
        assert rec.bits_sent == 1024 * 3  # M=8 -> 3 bits per symbol

    def test_ci_halfwidth_floor(self):
        rec = BerRecord(ebn0_db=0.0, nf_db=0.0, bits_sent=1000, bit_errors=0,
                        reached_min_errors=False)
        assert rec.ci_halfwidth == pytest.approx(1.96 / 1000)
        rec2 = BerRecord(ebn0_db=0.0, nf_db=0.0, bits_sent=10_000,
                         bit_errors=100, reached_min_errors=True)
        p = 0.01
        assert rec2.ci_halfwidth == pytest.approx(
            1.96 * np.sqrt(p * (1 - p) / 10_000)
        )


class TestStatisticalSanity:
    def test_ber_monotone_in_ebn0(self):
        cfg = small_cfg(u=1, ebn0_db=(0.0, 3.0, 6.0), max_symbols=30_000)
        recs = run_ber_scenario(cfg)
        for lo, hi in zip(recs, recs[1:]):
            assert hi.ber <= lo.ber + lo.ci_halfwidth

    def test_victim_symmetry(self):
        cfg = small_cfg(nf_db=(0.0,), ebn0_db=(3.0,), measure_all_users=True,
                        max_symbols=30_000)
        rec = run_ber_scenario(cfg)[0]
        assert len(rec.per_user) == 2
        bers = [e / b for (_, b, e) in rec.per_user]
        hw = rec.ci_halfwidth
        assert abs(bers[0] - bers[1]) <= 2 * hw

    def test_traditional_floor_above_windowed_design(self):
        trad = small_cfg(system="traditional_tdcs", m="full", u=3,
                         ebn0_db=(8.0,), nf_db=(10.0,), max_symbols=20_000)
        mui = small_cfg(u=3, ebn0_db=(8.0,), nf_db=(10.0,), max_symbols=20_000)
        r_trad = run_ber_scenario(trad)[0]
        r_mui = run_ber_scenario(mui)[0]
        assert r_trad.ber > r_mui.ber

    def test_traditional_heavy_load_error_floor(self):
        # eight strong interferers keep the full-range baseline far above
        # 1e-4 at every grid point (production size, shallow depth)
        cfg = ScenarioConfig(system="traditional_tdcs", n=64, l=16, m="full",
                             u=8, nf_db=(10.0,), ebn0_db=(4.0, 8.0),
                             max_symbols=2048, chunk_symbols=1024,
                             scenario_id="floor")
        recs = run_ber_scenario(cfg)
        assert all(r.ber > 1e-4 for r in recs)
        assert min(r.ber for r in recs) > 1e-2  # a floor, not a waterfall


class TestEngines:
    def test_noiseless_decisions_identical(self):
        # the traditional system makes interference-driven errors, so equal
        # counts here exercise real decisions, not just perfect decoding
        base = dict(system="traditional_tdcs", m="full", u=3, n=16, l=8,
                    ebn0_db=(float("inf"),), nf_db=(10.0,),
                    max_symbols=4096, chunk_symbols=1024,
                    min_bit_errors=10 ** 9, scenario_id="eng")
        corr = run_ber_scenario(ScenarioConfig(**base))[0]
        sig = run_ber_scenario(ScenarioConfig(**base, engine="signal"))[0]
        assert corr.bit_errors == sig.bit_errors > 0

    def test_noisy_engines_statistically_agree(self):
        base = dict(n=16, l=8, m=8, u=2, ebn0_db=(3.0,), nf_db=(6.0,),
                    max_symbols=40_000, chunk_symbols=8192,
                    min_bit_errors=10 ** 9, scenario_id="eng2")
        corr = run_ber_scenario(ScenarioConfig(**base))[0]
        sig = run_ber_scenario(ScenarioConfig(**base, engine="signal"))[0]
        # deterministic seeded outcome; both estimate the same BER
        assert corr.bit_errors > 300 and sig.bit_errors > 300
        assert abs(corr.ber - sig.ber) / corr.ber < 0.2

    def test_rake_engines_agree_noiseless(self):
        base = dict(n=16, l=8, m=8, u=2, channel="multipath", t_g=32,
                    ebn0_db=(float("inf"),), nf_db=(20.0,),
                    max_symbols=2048, chunk_symbols=512, scenario_id="eng3")
        corr = run_ber_scenario(ScenarioConfig(**base))[0]
        sig = run_ber_scenario(ScenarioConfig(**base, engine="signal"))[0]
        assert corr.bit_errors == sig.bit_errors == 0


class TestMismatch:
    def test_eta_one_is_perfect_sensing(self):
        perfect = run_ber_scenario(small_cfg())
        unity = run_mismatch_scenario(small_cfg(eta=1.0))
        assert perfect == unity

    def test_mismatch_degrades(self):
        perfect = run_ber_scenario(small_cfg(u=1, ebn0_db=(6.0,),
                                             max_symbols=60_000))[0]
        mism = run_mismatch_scenario(
            small_cfg(u=1, ebn0_db=(6.0,), eta=0.8, mismatch_seed=3,
                      max_symbols=60_000))[0]
        assert mism.ber > perfect.ber

    def test_requires_eta(self):
        with pytest.raises(ScenarioError):
            run_mismatch_scenario(small_cfg())


class TestEmission:
    def test_header_only_for_empty(self, tmp_path):
        cfg = small_cfg()
        csv_path, report_path = emit_results([], cfg, tmp_path)
        body = open(csv_path).read()
        assert body.splitlines() == [
            "scenario_id,system,U,NF_db,ebn0_db,bits,errors,ber,ci_halfwidth"
        ]

    def test_single_record_round_trip(self, tmp_path):
        cfg = small_cfg(max_symbols=4096)
        recs = run_ber_scenario(cfg)
        csv_path, report_path = emit_results(recs, cfg, tmp_path)
        lines = open(csv_path).read().splitlines()
        assert len(lines) == 2
        fields = lines[1].split(",")
        assert fields[0] == "unit"
        assert int(fields[5]) == recs[0].bits_sent
        assert float(fields[7]) == recs[0].ber
        report = open(report_path).read()
        assert config_digest(cfg) in report
        assert "stopping rule" in report

    def test_rerun_byte_identical(self, tmp_path):
        cfg = small_cfg(max_symbols=8192)
        a = records_to_csv(cfg, run_ber_scenario(cfg, threads=1))
        b = records_to_csv(cfg, run_ber_scenario(cfg, threads=2))
        assert a == b


class TestFullLoadResolution:
    def test_full_m_multiuser(self):
        cfg = small_cfg(m="full", u=2)
        system = build_system(cfg)
        assert system.m_order == 32  # m_max(8, 16, 2) = 2^floor(log2(48))
        cfg1 = small_cfg(m="full", u=1)
        assert build_system(cfg1).m_order == 128  # single user keys the circle

    def test_nf_sweep_grid(self):
        cfg = small_cfg(nf_db=(0.0, 8.0), ebn0_db=(2.0, 4.0), max_symbols=4096)
        recs = run_ber_scenario(cfg)
        assert [(r.nf_db, r.ebn0_db) for r in recs] == [
            (0.0, 2.0), (0.0, 4.0), (8.0, 2.0), (8.0, 4.0)
        ]
