use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use pindex_core::bench::{self, StringsCase, StringsParams};
use pindex_core::io::{self, Curve, PlotPanel};
use pindex_core::numkernel;
use pindex_core::pencil::{self, check_index2_structure_split, project_blocks, PHPencil, Pencil};
use pindex_core::randomized::{run_randomized_sweep, GinibreConfig, RandomizedCurve};
use pindex_core::rng::stream_rng;
use pindex_core::slope::{classify_curve, IndexVerdict, SlopeSegment, Tolerances};
use pindex_core::sweep::{self, default_delta, log_grid, EnvelopeKind, SweepConfig, SweepCurve};

use crate::cli::*;

/// Result of one command: text for standard output and named files for the
/// output directory.
#[derive(Default)]
pub struct Outcome {
    pub stdout: String,
    pub files: Vec<(String, Vec<u8>)>,
}

pub fn run(cmd: &Command, seed: u64, out: Option<&Path>) -> Result<Outcome> {
    match cmd {
        Command::Structure(a) => structure(a),
        Command::Sweep(a) => sweep_cmd(a, out.is_some()),
        Command::Randomized(a) => randomized(a, seed, out.is_some()),
        Command::Classify(a) => classify(a),
        Command::Bench(a) => bench_cmd(a, seed),
        Command::Replay(_) => unreachable!("replay is resolved before dispatch"),
    }
}

fn read_pencil(f: &PencilFiles) -> Result<Pencil> {
    let e = io::read_matrix(&f.e).with_context(|| format!("reading E from {}", f.e.display()))?;
    let a = io::read_matrix(&f.a).with_context(|| format!("reading A from {}", f.a.display()))?;
    Ok(Pencil::new(e, a)?)
}

fn grid(g: &GridArgs) -> Result<Vec<f64>> {
    Ok(log_grid(g.tau_min, g.tau_max, g.points)?)
}

fn check_scale(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(pindex_core::Error::DomainError(format!("--scale must be positive, got {s}")).into());
    }
    Ok(())
}

fn structure(a: &StructureArgs) -> Result<Outcome> {
    check_scale(a.scale)?;
    let p = read_pencil(&a.pencil)?.scaled(a.scale);
    let b = project_blocks(&p, a.rank_tol)?;
    let rank_tol = 1e-10 * numkernel::opnorm(&p.a)?;
    let report = check_index2_structure_split(&b, rank_tol, rank_tol.max(a.delta))?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    Ok(Outcome { stdout: text.clone(), files: vec![("structure.json".into(), text.into_bytes())] })
}

fn curve_files(stem: &str, curve: &Curve) -> Result<Vec<(String, Vec<u8>)>> {
    Ok(vec![
        (format!("{stem}.csv"), io::curve_csv(curve).into_bytes()),
        (format!("{stem}.json"), (serde_json::to_string_pretty(curve)? + "\n").into_bytes()),
    ])
}

fn render(curve: &Curve, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => io::curve_csv(curve),
        Format::Json => serde_json::to_string_pretty(curve)? + "\n",
    })
}

fn panel(title: &str, stem: &str, curve: &Curve) -> PlotPanel {
    let ylabel = match curve {
        Curve::Sweep(_) => "min |λ|",
        Curve::Randomized(_) => "mean min |λ|",
    };
    PlotPanel {
        title: title.into(),
        csv: format!("{stem}.csv"),
        bounds: curve.bounds().is_some(),
        markers: curve.markers(),
        ylabel: ylabel.into(),
    }
}

fn plot_file(panels: &[PlotPanel]) -> (String, Vec<u8>) {
    ("plot.gp".into(), io::render_plot_script(panels, "figure.png").into_bytes())
}

fn single_curve_outcome(curve: Curve, title: &str, format: Format, to_dir: bool) -> Result<Outcome> {
    if !to_dir {
        return Ok(Outcome { stdout: render(&curve, format)?, files: vec![] });
    }
    let mut files = curve_files("curve", &curve)?;
    files.push(plot_file(&[panel(title, "curve", &curve)]));
    Ok(Outcome { stdout: String::new(), files })
}

fn sweep_cmd(a: &SweepArgs, to_dir: bool) -> Result<Outcome> {
    check_scale(a.scale)?;
    let p = read_pencil(&a.pencil)?;
    let cfg = SweepConfig {
        tau_grid: grid(&a.grid)?,
        delta: a.delta.unwrap_or_else(default_delta),
        envelope: match a.envelope {
            Envelope::None => EnvelopeKind::None,
            Envelope::Thm1 => EnvelopeKind::Thm1,
            Envelope::DeltaE0 => EnvelopeKind::DeltaE0,
        },
        scale: a.scale,
        rank_tol: a.rank_tol,
        ..Default::default()
    };
    let c = sweep::run_sweep(&p, &cfg)?;
    single_curve_outcome(Curve::Sweep(c), "deterministic sweep", a.format, to_dir)
}

fn method_two(p: &Pencil, h: Option<f64>, cfg: &GinibreConfig) -> Result<RandomizedCurve> {
    let (mh, h) = match h {
        Some(h) => (pencil::cayley(p, h)?, h),
        None => {
            let ch = pencil::cayley_with_fallback(p)?;
            (ch.matrix, ch.h)
        }
    };
    let m = pencil::normalize_for_ginibre(&mh)?;
    let mut c = run_randomized_sweep(&m, cfg)?;
    c.meta.h = Some(h);
    Ok(c)
}

fn randomized(a: &RandomizedArgs, seed: u64, to_dir: bool) -> Result<Outcome> {
    check_scale(a.scale)?;
    let cfg = GinibreConfig {
        samples: a.samples,
        seed,
        tau_grid: grid(&a.grid)?,
        delta_norm: a.delta.unwrap_or_else(default_delta),
        resample_per_tau: a.resample,
    };
    let c = match (&a.m, &a.e, &a.a) {
        (Some(m), _, _) => {
            let m = io::read_matrix(m)?.scale_real(a.scale);
            run_randomized_sweep(&m, &cfg)?
        }
        (None, Some(e), Some(am)) => {
            let p = read_pencil(&PencilFiles { e: e.clone(), a: am.clone() })?.scaled(a.scale);
            method_two(&p, a.h, &cfg)?
        }
        _ => bail!(pindex_core::Error::DomainError("give either --M or both --E and --A".into())),
    };
    single_curve_outcome(Curve::Randomized(c), "randomized sweep", a.format, to_dir)
}

fn fmt_segment(s: &SlopeSegment) -> String {
    format!("{:?} [{:.3e}, {:.3e}] slope {:.3} ± {:.3}", s.label, s.tau_start, s.tau_end, s.slope, s.slope_std_err)
}

fn verdict_text(v: &IndexVerdict, segs: &[SlopeSegment]) -> String {
    let mut s = format!("{:?}\n", v.verdict);
    if let Some(h) = &v.half_plateau {
        let _ = writeln!(s, "half plateau: {}", fmt_segment(h));
    }
    if let Some(t) = v.crossover_tau {
        let _ = writeln!(s, "crossover: {t:.3e}");
    }
    for seg in segs {
        let _ = writeln!(s, "segment: {}", fmt_segment(seg));
    }
    for n in &v.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn classify_one(curve: &Curve, window: usize, tol: &Tolerances) -> Result<(Vec<SlopeSegment>, IndexVerdict)> {
    Ok(classify_curve(curve.tau(), curve.value(), &curve.markers(), window, tol)?)
}

fn classify(a: &ClassifyArgs) -> Result<Outcome> {
    let curve = io::read_curve(&a.input).with_context(|| format!("reading curve {}", a.input.display()))?;
    let tol = Tolerances { slope_tol: a.slope_tol, min_decades: a.min_decades };
    let (segs, v) = classify_one(&curve, a.window, &tol)?;
    let text = match a.format {
        Some(Format::Json) => {
            serde_json::to_string_pretty(&serde_json::json!({ "verdict": v, "segments": segs }))? + "\n"
        }
        _ => verdict_text(&v, &segs),
    };
    Ok(Outcome { stdout: text.clone(), files: vec![("verdict.txt".into(), text.into_bytes())] })
}

enum BenchInput {
    Plain(Pencil),
    Ph(PHPencil),
}

fn bench_cmd(a: &BenchArgs, seed: u64) -> Result<Outcome> {
    check_scale(a.scale)?;
    let tau_grid = grid(&a.grid)?;
    let eps = a.eps.unwrap_or_else(default_delta);
    let mut rng = stream_rng(seed, 0);
    let toy_n = a.n.unwrap_or(100);
    let input = match a.family {
        Family::Toy | Family::Perturbed => BenchInput::Plain(bench::gen_toy(toy_n, &mut rng)),
        Family::Congruence => {
            let p = bench::gen_toy(toy_n, &mut rng);
            BenchInput::Plain(bench::gen_congruence(&p, &mut rng))
        }
        Family::Analytic => BenchInput::Plain(bench::gen_analytic2x2()),
        Family::StringsA | Family::StringsB => {
            let case = if a.family == Family::StringsA { StringsCase::A } else { StringsCase::B };
            BenchInput::Ph(bench::gen_strings(&StringsParams::nominal(a.n.unwrap_or(10), eps, case))?)
        }
    };
    let is_strings = matches!(input, BenchInput::Ph(_));
    let cfg = SweepConfig {
        tau_grid: tau_grid.clone(),
        delta: a.delta.unwrap_or(if is_strings { 3.0 * eps } else { default_delta() }),
        scale: a.scale,
        rank_tol: a.rank_tol.or(is_strings.then_some(10.0 * eps)),
        ..Default::default()
    };
    let tol = Tolerances::default();
    let mut out = Outcome::default();
    let mut panels = Vec::new();

    if a.family == Family::Perturbed {
        let BenchInput::Plain(p) = &input else { unreachable!() };
        let variances = [(-7.0f64).exp(), (-5.0f64).exp(), (-3.0f64).exp()];
        let curves = sweep::run_perturbation_study(p, &variances, &cfg, seed)?;
        for (k, (c, exp)) in curves.into_iter().zip([-7, -5, -3]).enumerate() {
            let stem = format!("variance{}", k + 1);
            let curve = Curve::Sweep(c);
            report_verdict(&mut out.stdout, &stem, &curve, &tol)?;
            panels.push(panel(&format!("variance e^{{{exp}}}"), &stem, &curve));
            out.files.extend(curve_files(&stem, &curve)?);
        }
        out.files.push(plot_file(&panels));
        return Ok(out);
    }

    if matches!(a.method, Methods::One | Methods::Both) {
        let c: SweepCurve = match &input {
            BenchInput::Plain(p) => sweep::run_sweep(p, &cfg)?,
            BenchInput::Ph(ph) => sweep::run_ph_sweep(ph, &cfg, !a.reduced)?,
        };
        let curve = Curve::Sweep(c);
        report_verdict(&mut out.stdout, "method1", &curve, &tol)?;
        panels.push(panel("method 1: deterministic", "method1", &curve));
        out.files.extend(curve_files("method1", &curve)?);
    }
    if matches!(a.method, Methods::Two | Methods::Both) {
        let p = match &input {
            BenchInput::Plain(p) => p.clone(),
            BenchInput::Ph(ph) => ph.to_pencil(),
        };
        let gcfg = GinibreConfig { samples: a.samples, seed, tau_grid, delta_norm: default_delta(), resample_per_tau: false };
        let curve = Curve::Randomized(method_two(&p.scaled(a.scale), a.h, &gcfg)?);
        report_verdict(&mut out.stdout, "method2", &curve, &tol)?;
        panels.push(panel("method 2: randomized", "method2", &curve));
        out.files.extend(curve_files("method2", &curve)?);
    }
    out.files.push(plot_file(&panels));
    Ok(out)
}

fn report_verdict(s: &mut String, label: &str, curve: &Curve, tol: &Tolerances) -> Result<()> {
    match classify_one(curve, pindex_core::slope::DEFAULT_WINDOW, tol) {
        Ok((_, v)) => {
            let _ = write!(s, "{label}: {:?}", v.verdict);
            if let Some(t) = v.crossover_tau {
                let _ = write!(s, " crossover {t:.3e}");
            }
            s.push('\n');
        }
        Err(e) => {
            let _ = writeln!(s, "{label}: unclassified ({e})");
        }
    }
    Ok(())
}

/// Writes every file of `o` into `dir`.
pub fn write_outputs(o: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    o.files
        .iter()
        .map(|(name, bytes)| {
            let p = dir.join(name);
            io::write_atomic(&p, bytes)?;
            Ok(p)
        })
        .collect()
}
