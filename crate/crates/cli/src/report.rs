//! Renders a finished two-mode experiment to disk and to the terminal.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use beamtrack_core::{aggregate_csv, AggregateMetrics, EpisodeTrace, Mode, SimConfig};
use serde_json::{json, Map, Number, Value};

/// Linear SNR floor matching the trace formatter, so `log10` never sees zero.
const SNR_FLOOR: f64 = 1e-300;

/// Everything `run` produced, paired with the config that produced it.
pub struct RunReport<'a> {
    pub cfg: &'a SimConfig,
    pub adaptive_traces: &'a [EpisodeTrace],
    pub fixed_traces: &'a [EpisodeTrace],
    pub adaptive: &'a AggregateMetrics,
    pub fixed: &'a AggregateMetrics,
}

impl RunReport<'_> {
    /// Writes one trace CSV per (episode, mode) plus the aggregate in each
    /// requested format. Returns the paths written, in writing order.
    pub fn write(&self, out_dir: &Path, csv: bool, json: bool) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(out_dir)?;
        let mut written = Vec::new();
        for (mode, traces) in [
            (Mode::Adaptive, self.adaptive_traces),
            (Mode::Fixed, self.fixed_traces),
        ] {
            for (i, trace) in traces.iter().enumerate() {
                let path = out_dir.join(format!("trace_run{i}_{}.csv", mode.as_str()));
                fs::write(&path, trace.to_csv())?;
                written.push(path);
            }
        }
        if csv {
            let path = out_dir.join("aggregate.csv");
            let body = aggregate_csv(self.adaptive, self.fixed)
                .map_err(|e| io::Error::other(e.to_string()))?;
            fs::write(&path, body)?;
            written.push(path);
        }
        if json {
            let path = out_dir.join("aggregate.json");
            let body = serde_json::to_string_pretty(&self.json_value())
                .map_err(|e| io::Error::other(e.to_string()))?;
            fs::write(&path, body + "\n")?;
            written.push(path);
        }
        Ok(written)
    }

    /// The aggregate as a JSON tree: the effective config, per-slot series
    /// for both modes, and the headline scalars. Non-finite numbers (a
    /// degenerate correlation pool) become `null`.
    pub fn json_value(&self) -> Value {
        let cfg = self.cfg;
        let config = json!({
            "m0": cfg.array.total_elements(),
            "s": cfg.particles,
            "d": cfg.pilot_len,
            "k_steps": cfg.k_steps,
            "runs": cfg.runs,
            "seed": cfg.seed,
            "alpha0_re": cfg.x0.alpha_re,
            "alpha0_im": cfg.x0.alpha_im,
            "phi0_deg": cfg.x0.phi.degrees(),
            "sigma_alpha": cfg.process_noise.sigma_alpha_re(),
            "sigma_phi_deg": cfg.process_noise.sigma_phi().to_degrees(),
            "snr0_db": cfg.snr0_db,
        });
        let mut root = Map::new();
        root.insert("config".into(), config);
        root.insert("adaptive".into(), mode_value(self.adaptive));
        root.insert("fixed".into(), mode_value(self.fixed));
        root.insert(
            "improvement_pct".into(),
            finite_or_null(improvement_pct(self.adaptive, self.fixed)),
        );
        Value::Object(root)
    }

    /// The human-facing run summary printed to stdout.
    pub fn summary(&self) -> String {
        let cfg = self.cfg;
        let a = self.adaptive.time_averaged_rmse().to_degrees();
        let f = self.fixed.time_averaged_rmse().to_degrees();
        let mut s = String::new();
        writeln!(
            s,
            "runs={} slots={} particles={} m0={} seed={}",
            cfg.runs,
            cfg.k_steps,
            cfg.particles,
            cfg.array.total_elements(),
            cfg.seed
        )
        .unwrap();
        writeln!(s, "mode      time_avg_rmse_deg").unwrap();
        writeln!(s, "adaptive  {a:>13.4}").unwrap();
        writeln!(s, "fixed     {f:>13.4}").unwrap();
        writeln!(
            s,
            "improvement over fixed: {}",
            match improvement_pct(self.adaptive, self.fixed) {
                p if p.is_finite() => format!("{p:.1}%"),
                _ => "n/a".to_string(),
            }
        )
        .unwrap();
        writeln!(
            s,
            "corr(e_k, |err|), adaptive pool: {}",
            match self.adaptive.pearson_e_vs_abs_err {
                r if r.is_finite() => format!("{r:.4}"),
                _ => "n/a".to_string(),
            }
        )
        .unwrap();
        s
    }
}

/// One mode's aggregate as JSON.
fn mode_value(agg: &AggregateMetrics) -> Value {
    let mut m = Map::new();
    m.insert(
        "time_avg_rmse_deg".into(),
        finite_or_null(agg.time_averaged_rmse().to_degrees()),
    );
    m.insert(
        "pearson_e_vs_abs_err".into(),
        finite_or_null(agg.pearson_e_vs_abs_err),
    );
    m.insert(
        "rmse_deg".into(),
        float_array(agg.rmse_per_step.iter().map(|r| r.to_degrees())),
    );
    m.insert(
        "mean_m".into(),
        float_array(agg.mean_m_per_step.iter().copied()),
    );
    m.insert(
        "mean_snr_db".into(),
        float_array(
            agg.mean_snr_per_step
                .iter()
                .map(|&x| 10.0 * x.max(SNR_FLOOR).log10()),
        ),
    );
    Value::Object(m)
}

/// Percentage RMSE reduction of adaptive relative to fixed.
fn improvement_pct(adaptive: &AggregateMetrics, fixed: &AggregateMetrics) -> f64 {
    let a = adaptive.time_averaged_rmse();
    let f = fixed.time_averaged_rmse();
    100.0 * (f - a) / f
}

fn finite_or_null(x: f64) -> Value {
    Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn float_array(xs: impl Iterator<Item = f64>) -> Value {
    Value::Array(xs.map(finite_or_null).collect())
}
