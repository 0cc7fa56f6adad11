"""Seeded Monte Carlo experiments producing one-metric-per-row result tables.

Seeding: each trial owns ``np.random.SeedSequence([seed, crc32(experiment_id),
trial_index])``; conditions inside a trial (SNR, fading depth, ...) get the
spawned children of that sequence in grid order. Results therefore do not
depend on worker count or scheduling.
"""

import csv
import logging
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .. import analysis, metrics, rdm
from ..estimators import Scheme, estimate
from ..numerology import (SPEED_OF_LIGHT, SubcarrierGrid, encode_frame, random_prs,
                          random_transitions)
from ..scene import (PathSpec, SceneConfig, db_gain, fading_profile, observe, random_target,
                     synthesize_frame)
from .config import ExperimentConfig

log = logging.getLogger(__name__)

THREADS_ENV = "DABRADAR_THREADS"
CSV_COLUMNS = ("experiment_id", "scheme", "snr_db", "alpha", "trial", "condition",
               "metric_name", "value", "units")

REPRESENTATIVE_DELAYS = (45, 92, 138)
REPRESENTATIVE_VELOCITIES = (-210.0, 80.0, 235.0)


@dataclass(frozen=True)
class ResultRow:
    experiment_id: str
    scheme: str
    snr_db: float
    alpha: float
    trial: int
    condition: str
    metric_name: str
    value: float
    units: str

    def sort_key(self):
        return (self.condition, self.snr_db, self.alpha, self.scheme, self.trial,
                self.metric_name)


def trial_seed(seed: int, experiment_id: str, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, zlib.crc32(experiment_id.encode()),
                                   trial])


def condition_rngs(cfg: ExperimentConfig, trial: int, n: int):
    children = trial_seed(cfg.seed, cfg.experiment_id, trial).spawn(n)
    return [np.random.default_rng(c) for c in children]


def grid_for(cfg: ExperimentConfig) -> SubcarrierGrid:
    return SubcarrierGrid(null_len=cfg.null_len)


def base_scene(cfg: ExperimentConfig, rng: np.random.Generator, targets=None,
               fading_db=None) -> SceneConfig:
    """Static paths from the config with random phases, plus targets."""
    grid = grid_for(cfg)
    paths = [PathSpec(db_gain(cfg.direct_gain_db, rng.uniform(0, 2 * np.pi)), 0.0)]
    for d, g in zip(cfg.multipath_delays, cfg.multipath_gains_db):
        paths.append(PathSpec(db_gain(g, rng.uniform(0, 2 * np.pi)), float(d)))
    if targets is None:
        targets = []
        ref = db_gain(cfg.direct_gain_db)
        for d, v, g in zip(cfg.target_delays, cfg.target_velocities, cfg.target_gains_db):
            nu = cfg.bistatic_scale * v * cfg.carrier_hz / SPEED_OF_LIGHT
            targets.append(PathSpec(abs(ref) * db_gain(g, rng.uniform(0, 2 * np.pi)),
                                    float(d), nu))
    depth = cfg.fading_depth_db if fading_db is None else fading_db
    return SceneConfig(paths=paths, targets=targets, fading_depth_db=depth, frames=cfg.frames,
                       carrier_hz=cfg.carrier_hz, bistatic_scale=cfg.bistatic_scale, grid=grid)


@dataclass
class TrialData:
    scene: SceneConfig
    truth: np.ndarray  # [F, K, M]
    symbols: np.ndarray
    prs: np.ndarray
    y: np.ndarray
    noise_var: float


def simulate(scene: SceneConfig, snr_db, rng: np.random.Generator) -> TrialData:
    """Draw fading, symbols and noise for ``scene.frames`` frames.

    SNR is mean per-resource-element signal power over the noise variance;
    ``snr_db = inf`` gives a noiseless run.
    """
    grid = scene.grid
    fading = fading_profile(scene.fading_depth_db, rng, grid)
    truth = np.stack([synthesize_frame(scene, f, fading) for f in range(scene.frames)])
    noise_var = 0.0 if np.isinf(snr_db) else float(np.mean(np.abs(truth) ** 2)
                                                     / 10 ** (snr_db / 10))
    prs = random_prs(rng, grid)
    symbols = np.stack([encode_frame(prs, random_transitions(rng, grid)).symbols
                        for _ in range(scene.frames)])
    y = observe(truth, symbols, noise_var, rng)
    return TrialData(scene, truth, symbols, prs, y, noise_var)


def run_scheme(data: TrialData, scheme, alpha, smooth_window=1):
    """Estimate every frame; returns stacked (symbols, tracking, sensing, K, G)."""
    outs = [estimate(scheme, data.y[f], data.prs, alpha, data.noise_var, smooth_window)
            for f in range(data.y.shape[0])]
    return (np.stack([o.recon.symbols for o in outs]),
            np.stack([o.tracking_csi for o in outs]),
            np.stack([o.sensing_csi for o in outs]),
            np.stack([o.tracking_gain for o in outs]),
            np.stack([o.sensing_gain for o in outs]))


def make_map(cfg: ExperimentConfig, sensing, grid):
    n_frames = sensing.shape[0]
    span = cfg.doppler_span_hz or None
    bins = cfg.doppler_bins or None
    dgrid = rdm.default_doppler_grid(n_frames, grid, span, bins)
    return rdm.range_doppler_map(sensing, grid, dgrid, cfg.window)


def region_for(cfg: ExperimentConfig, rmap: rdm.RangeDopplerMap, target: PathSpec):
    return metrics.RegionSpec((rmap.range_index(int(round(target.delay_bins))),
                               rmap.doppler_index(target.doppler_hz)),
                              rmap.doppler_index(0.0), cfg.guard_range, cfg.guard_doppler,
                              cfg.window_range, cfg.window_doppler, cfg.guard_dc)


def map_peaks(power, n, guard_r=2, guard_d=2):
    """Strongest n cells with a guard box suppressed around each pick."""
    p = np.array(power, dtype=float)
    peaks = []
    for _ in range(n):
        i, j = np.unravel_index(np.argmax(p), p.shape)
        peaks.append((int(i), int(j)))
        p[max(i - guard_r, 0):i + guard_r + 1, max(j - guard_d, 0):j + guard_d + 1] = -np.inf
    return peaks


def _row(cfg, scheme, snr, alpha, trial, cond, name, value, units):
    return ResultRow(cfg.experiment_id, str(scheme), float(snr), float(alpha), int(trial), cond,
                     name, float(value), units)


# --- per-trial workers (module level so they pickle) ----------------------

def _snr_trial(cfg: ExperimentConfig, trial: int):
    snrs = list(cfg.snr_grid_db) + ([float("inf")] if cfg.include_noiseless else [])
    rows = []
    for snr, rng in zip(snrs, condition_rngs(cfg, trial, len(snrs))):
        data = simulate(base_scene(cfg, rng), snr, rng)
        for s in cfg.schemes:
            alpha = 0.0 if s == Scheme.POSTERIOR_A0 else cfg.alpha
            sym, trk, sen, _, _ = run_scheme(data, s, alpha, cfg.smooth_window)
            cond = "noiseless" if np.isinf(snr) else ""
            rows += [
                _row(cfg, s, snr, alpha, trial, cond, "ser",
                     metrics.symbol_error_rate(sym, data.symbols), "ratio"),
                _row(cfg, s, snr, alpha, trial, cond, "nmse_tracking_db",
                     metrics.nmse_db(trk, data.truth), "dB"),
                _row(cfg, s, snr, alpha, trial, cond, "nmse_sensing_db",
                     metrics.nmse_db(sen, data.truth), "dB"),
            ]
    return rows


def _alpha_trial(cfg: ExperimentConfig, trial: int):
    rows = []
    snrs = list(cfg.snr_grid_db)
    for snr, rng in zip(snrs, condition_rngs(cfg, trial, len(snrs))):
        data = simulate(base_scene(cfg, rng), snr, rng)
        grid = data.scene.grid
        for alpha in cfg.alpha_grid:
            sym, trk, sen, k, g = run_scheme(data, Scheme.PROPOSED, alpha, cfg.smooth_window)
            rmap = make_map(cfg, sen, grid)
            tbrs = [metrics.tbr_db(rmap.power, region_for(cfg, rmap, t))
                    for t in data.scene.targets]
            k_bar, g_bar = metrics.average_gains(k, g)
            rows += [
                _row(cfg, "proposed", snr, alpha, trial, "", "ser",
                     metrics.symbol_error_rate(sym, data.symbols), "ratio"),
                _row(cfg, "proposed", snr, alpha, trial, "", "nmse_tracking_db",
                     metrics.nmse_db(trk, data.truth), "dB"),
                _row(cfg, "proposed", snr, alpha, trial, "", "k_mean", k_bar, "ratio"),
                _row(cfg, "proposed", snr, alpha, trial, "", "g_mean", g_bar, "ratio"),
            ]
            if tbrs:
                rows.append(_row(cfg, "proposed", snr, alpha, trial, "", "tbr_db", min(tbrs),
                                 "dB"))
    return rows


def representative_targets(cfg: ExperimentConfig, rng):
    out = []
    for d, v in zip(REPRESENTATIVE_DELAYS, REPRESENTATIVE_VELOCITIES):
        nu = cfg.bistatic_scale * v * cfg.carrier_hz / SPEED_OF_LIGHT
        out.append(PathSpec(db_gain(cfg.direct_gain_db + cfg.representative_gain_db,
                                    rng.uniform(0, 2 * np.pi)), float(d), nu))
    return out


def _representative_trial(cfg: ExperimentConfig, trial: int, out_dir=None):
    rows = []
    snr = cfg.snr_grid_db[0]
    (rng,) = condition_rngs(cfg, trial, 1)
    scene = base_scene(cfg, rng, targets=representative_targets(cfg, rng))
    data = simulate(scene, snr, rng)
    grid = scene.grid
    for s in cfg.schemes:
        alpha = 0.0 if s == Scheme.POSTERIOR_A0 else cfg.alpha
        _, _, sen, _, _ = run_scheme(data, s, alpha, cfg.smooth_window)
        rmap = make_map(cfg, sen, grid)
        tbrs = []
        for i, t in enumerate(scene.targets):
            tbrs.append(metrics.tbr_db(rmap.power, region_for(cfg, rmap, t)))
            rows.append(_row(cfg, s, snr, alpha, trial, f"target{i}", "tbr_db", tbrs[-1], "dB"))
        rows.append(_row(cfg, s, snr, alpha, trial, "", "min_tbr_db", min(tbrs), "dB"))
        truth_cells = [(rmap.range_index(int(t.delay_bins)), rmap.doppler_index(t.doppler_hz))
                       for t in scene.targets]
        peaks = map_peaks(rmap.power, len(truth_cells), cfg.guard_range, cfg.guard_doppler)
        hit = all(any(abs(pi - ti) <= 1 and abs(pj - tj) <= 1 for pi, pj in peaks)
                  for ti, tj in truth_cells)
        rows.append(_row(cfg, s, snr, alpha, trial, "", "peaks_at_truth", float(hit), "bool"))
        if out_dir is not None and cfg.save_maps and trial == 0:
            rdm.write_map_binary(rmap, Path(out_dir) / f"map_{s}.bin")
            rdm.write_map_csv(rmap, Path(out_dir) / f"map_{s}.csv")
    return rows


def _random_trial(cfg: ExperimentConfig, trial: int):
    rows = []
    conds = [(d, snr) for d in cfg.fading_depths_db for snr in cfg.snr_grid_db]
    for (depth, snr), rng in zip(conds, condition_rngs(cfg, trial, len(conds))):
        ref = abs(db_gain(cfg.direct_gain_db)) ** 2
        target, _ = random_target(rng, ref, cfg.carrier_hz, cfg.bistatic_scale)
        scene = base_scene(cfg, rng, targets=[target], fading_db=depth)
        data = simulate(scene, snr, rng)
        cond = f"fading_depth_db={depth:g}"
        for s in cfg.schemes:
            alpha = 0.0 if s == Scheme.POSTERIOR_A0 else cfg.alpha
            _, _, sen, _, _ = run_scheme(data, s, alpha, cfg.smooth_window)
            rmap = make_map(cfg, sen, scene.grid)
            region = region_for(cfg, rmap, target)
            p = rmap.power
            rows += [
                _row(cfg, s, snr, alpha, trial, cond, "tbr_db", metrics.tbr_db(p, region), "dB"),
                _row(cfg, s, snr, alpha, trial, cond, "rf_db",
                     metrics.range_focus_db(p, region), "dB"),
                _row(cfg, s, snr, alpha, trial, cond, "df_db",
                     metrics.doppler_focus_db(p, region), "dB"),
            ]
    return rows


def _oracle_trial(cfg: ExperimentConfig, trial: int):
    """Flat unit channel, exact prediction: measured slip rate vs the union bound."""
    rows = []
    snrs = list(cfg.snr_grid_db)
    n = 20000
    for snr, rng in zip(snrs, condition_rngs(cfg, trial, len(snrs))):
        noise_var = 10 ** (-snr / 10)
        slips_p, slips_o, mg_p, mg_o = flat_channel_slips(n, noise_var, rng)
        gp = analysis.gamma_proposed(1.0, noise_var, 0.0)
        go = analysis.gamma_open_loop(1.0, noise_var, 0.0)
        rows += [
            _row(cfg, "proposed", snr, 0.0, trial, "", "slip_rate", slips_p, "ratio"),
            _row(cfg, "proposed", snr, 0.0, trial, "", "slip_bound", analysis.slip_bound(gp),
                 "ratio"),
            _row(cfg, "open_loop", snr, 0.0, trial, "", "slip_rate", slips_o, "ratio"),
            _row(cfg, "open_loop", snr, 0.0, trial, "", "slip_bound", analysis.slip_bound(go),
                 "ratio"),
            _row(cfg, "proposed", snr, 0.0, trial, "", "gamma_measured", mg_p, "ratio"),
            _row(cfg, "open_loop", snr, 0.0, trial, "", "gamma_measured", mg_o, "ratio"),
            _row(cfg, "proposed", snr, 0.0, trial, "", "gamma_ratio_vs_open_loop", mg_p / mg_o,
                 "ratio"),
        ]
    return rows


def flat_channel_slips(n, noise_var, rng):
    """Flat unit channel with exact prediction; returns (slip_prop, slip_ol, gamma_prop, gamma_ol).

    The measured transition SNRs are |E s|^2 / var(s) of the de-rotated
    decision statistics y conj(H X_prev) and y conj(y_prev).
    """
    from ..estimators import map_detect
    from ..numerology import ALPHABET, nearest_transition

    q = rng.integers(0, 4, n)
    x_prev = ALPHABET[rng.integers(0, 4, n)]
    x = x_prev * ALPHABET[q]
    w = np.sqrt(noise_var / 2) * (rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n)))
    y_prev = x_prev + w[0]
    y = x + w[1]
    q_prop = map_detect(y, np.ones(n), x_prev).q_hat
    q_ol = nearest_transition(y * np.conj(y_prev))
    s_prop = y * np.conj(x_prev) * np.conj(ALPHABET[q])
    s_ol = y * np.conj(y_prev) * np.conj(ALPHABET[q])
    g_prop = abs(s_prop.mean()) ** 2 / np.var(s_prop)
    g_ol = abs(s_ol.mean()) ** 2 / np.var(s_ol)
    return float(np.mean(q_prop != q)), float(np.mean(q_ol != q)), float(g_prop), float(g_ol)


WORKERS = {
    "snr_sweep": _snr_trial,
    "alpha_sweep": _alpha_trial,
    "representative_scene": _representative_trial,
    "random_scenes": _random_trial,
    "unit_oracles": _oracle_trial,
}


def _call(args):
    fn, cfg, trial, kwargs = args
    return fn(cfg, trial, **kwargs)


def run_experiment(cfg: ExperimentConfig, out_dir=None, write=True):
    """Run every trial of ``cfg.experiment_id`` and return sorted rows.

    Rows are also written to ``<out_dir>/<experiment_id>.csv`` when
    ``write`` is true.
    """
    cfg.validate()
    out_dir = Path(out_dir or cfg.output_dir)
    if write:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise RuntimeError(f"cannot create output directory {out_dir}: {exc}") from exc
    fn = WORKERS[cfg.experiment_id]
    kwargs = {"out_dir": out_dir if write else None} if fn is _representative_trial else {}
    threads = int(os.environ.get(THREADS_ENV, cfg.threads))
    tasks = [(fn, cfg, t, kwargs) for t in range(cfg.trials)]
    log.info("running %s: %d trials on %d worker(s)", cfg.experiment_id, cfg.trials, threads)
    if threads > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_call, tasks))
    else:
        chunks = [_call(t) for t in tasks]
    rows = sorted((r for chunk in chunks for r in chunk), key=ResultRow.sort_key)
    bad = [r for r in rows if not np.isfinite(r.value)]
    if bad:
        raise RuntimeError(f"non-finite metric values, first: {bad[0]}")
    if write:
        write_rows(rows, out_dir / f"{cfg.experiment_id}.csv")
        if cfg.experiment_id == "random_scenes":
            write_summary(rows, out_dir / "random_scenes_median.csv", np.median)
        elif cfg.experiment_id != "unit_oracles":
            write_summary(rows, out_dir / f"{cfg.experiment_id}_mean.csv", np.mean)
    return rows


def write_rows(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in rows:
            wr.writerow([r.experiment_id, r.scheme, repr(r.snr_db), repr(r.alpha), r.trial,
                         r.condition, r.metric_name, repr(r.value), r.units])


def summarize(rows, reducer=np.mean):
    """Reduce over trials: {(condition, scheme, snr, alpha, metric): value}."""
    groups = {}
    for r in rows:
        groups.setdefault((r.condition, r.scheme, r.snr_db, r.alpha, r.metric_name),
                          []).append(r.value)
    return {k: float(reducer(v)) for k, v in sorted(groups.items())}


def write_summary(rows, path, reducer):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["condition", "scheme", "snr_db", "alpha", "metric_name", "value", "trials"])
        counts = {}
        for r in rows:
            key = (r.condition, r.scheme, r.snr_db, r.alpha, r.metric_name)
            counts[key] = counts.get(key, 0) + 1
        for key, v in summarize(rows, reducer).items():
            cond, scheme, snr, alpha, name = key
            wr.writerow([cond, scheme, repr(snr), repr(alpha), name, repr(v), counts[key]])


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None}).validate()
