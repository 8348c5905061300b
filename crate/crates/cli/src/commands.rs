use std::path::{Path, PathBuf};

use invthresh::blaschke::{ProductSpec, StackKind, lemma4_lower_bound, lemma4_upper_bound, threshold_of};
use invthresh::cache;
use invthresh::construction::{
    ThresholdTarget, WitnessSet, adaptive_construction, sparse_witness_product, spec_threshold, uniform_stack,
    witness_min_on_zeros,
};
use invthresh::covering::{
    GridRegion, StripGrid, corona_eta, gmn_eta_of_epsilon, verify_halfplane_covering, verify_strip_covering,
};
use invthresh::geometry::{Point, pseudo_circle};
use invthresh::model_op::{DeltaSweepOptions, adjoint_targets, build_section, delta_sweep, section_zeros};
use invthresh::ric::{BlockOperator, decay_table};

use crate::CliError;
use crate::config::{RunConfig, StackChoice};
use crate::output::{num, opt_num, write_table};

pub struct Context {
    pub command: &'static str,
    pub timestamp: bool,
}

fn set<T: Clone>(slot: &mut Option<T>, default: T) -> T {
    slot.get_or_insert(default).clone()
}

fn header(ctx: &Context, cfg: &RunConfig, spec: Option<&ProductSpec<f64>>) -> Vec<String> {
    let mut h = vec![
        format!("invthresh {}", env!("CARGO_PKG_VERSION")),
        format!("command = \"{}\"", ctx.command),
    ];
    h.extend(cfg.echo());
    if let Some(s) = spec {
        h.push(format!("spec_sha256 = \"{}\"", cache::spec_hash(s)));
    }
    if ctx.timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        h.push(format!("generated_unix = {secs}"));
    }
    h
}

fn build(cfg: &mut RunConfig, default_stack: StackChoice) -> Result<(ProductSpec<f64>, WitnessSet<f64>), CliError> {
    let target = match cfg.delta1 {
        Some(d) => ThresholdTarget::from_delta1(d)?,
        None => ThresholdTarget::from_alpha(set(&mut cfg.alpha, 1.0))?,
    };
    let rho = set(&mut cfg.rho, 1.0);
    let levels = set(&mut cfg.levels, 4);
    Ok(match set(&mut cfg.stack, default_stack) {
        StackChoice::Uniform => uniform_stack(target.alpha(), rho, levels)?,
        StackChoice::Adaptive => adaptive_construction(target, rho, levels)?,
    })
}

/// The cached zero set when `cache` is set, otherwise a fresh build.
fn obtain(cfg: &mut RunConfig, default_stack: StackChoice) -> Result<(ProductSpec<f64>, WitnessSet<f64>), CliError> {
    match &cfg.cache {
        Some(p) => Ok(cache::load(p)?),
        None => build(cfg, default_stack),
    }
}

pub fn dispatch(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    match ctx.command {
        "construct" => construct(ctx, cfg),
        "verify-covering" => verify_covering(ctx, cfg),
        "verify-bounds" => verify_bounds(ctx, cfg),
        "corona" => corona(ctx, cfg),
        "gmn" => gmn(ctx, cfg),
        "witness" => witness(ctx, cfg),
        "sweep-c1" => sweep_c1(ctx, cfg),
        "ric-demo" => ric_demo(ctx, cfg),
        "figure1" => figure1(ctx, &mut cfg),
        other => Err(CliError::Usage(format!("unknown command {other}"))),
    }
}

fn construct(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    let (spec, w) = build(&mut cfg, StackChoice::Uniform)?;
    if let Some(p) = &cfg.cache {
        let bytes = cache::encode(&spec, &w);
        match std::fs::read(p) {
            Ok(old) if old == bytes => eprintln!("cache {} is up to date", p.display()),
            _ => {
                cache::save(p, &spec, &w)?;
                eprintln!("cache written to {}", p.display());
            }
        }
    }
    let mut rows = Vec::new();
    for (level, range) in spec.level_ranges().into_iter().enumerate() {
        for i in range {
            let r = spec.rows()[i];
            rows.push(vec![level.to_string(), i.to_string(), num(r.alpha()), num(r.gamma())]);
        }
    }
    let fmin = witness_min_on_zeros(&spec, &w.f_zeros)?;
    eprintln!(
        "{} rows, {} witness points, min |f| on zeros in [{}, {}], threshold {}",
        spec.rows().len(),
        w.v.len(),
        num(fmin.lo),
        num(fmin.hi),
        num(spec_threshold(&spec)?)
    );
    write_table(
        cfg.out.as_deref(),
        &header(ctx, &cfg, Some(&spec)),
        &["level", "row", "alpha", "gamma"],
        &rows,
    )
}

fn strip_grid(cfg: &mut RunConfig) -> StripGrid {
    StripGrid {
        n_re: set(&mut cfg.n_re, 200),
        n_im: set(&mut cfg.n_im, 200),
        log_im: set(&mut cfg.log_im, false),
    }
}

fn verify_covering(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    let (spec, _) = obtain(&mut cfg, StackChoice::Uniform)?;
    let grid = strip_grid(&mut cfg);
    let eps = match cfg.epsilon {
        Some(e) => e,
        None => {
            let rows = match cfg.row {
                Some(i) => spec.rows().get(i..=i).unwrap_or(&[]),
                None => spec.rows(),
            };
            let worst = rows.iter().map(|r| threshold_of(r.alpha())).fold(0.0, f64::max);
            worst + set(&mut cfg.epsilon_offset, 1e-6)
        }
    };
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!("covering radius {eps} outside (0, 1)")));
    }
    let report = match cfg.row {
        Some(i) => {
            let row = spec
                .rows()
                .get(i)
                .ok_or_else(|| CliError::Usage(format!("row {i} beyond the {} rows", spec.rows().len())))?;
            verify_strip_covering(row, eps, grid)?
        }
        None => verify_halfplane_covering(&spec, eps, grid)?,
    };
    let mut rows = vec![vec![
        num(report.worst.re()),
        num(report.worst.im()),
        num(report.max_min_dist),
        report.pass.to_string(),
    ]];
    for s in &report.failing {
        rows.push(vec![
            num(s.point.re()),
            num(s.point.im()),
            num(s.min_dist),
            "false".into(),
        ]);
    }
    let mut h = header(ctx, &cfg, Some(&spec));
    h.push(format!("epsilon = {}", num(eps)));
    h.push(format!(
        "samples = {}, failing = {}",
        report.n_samples, report.n_failing
    ));
    h.push(format!(
        "resolution = [{}, {}]",
        num(report.resolution.0),
        num(report.resolution.1)
    ));
    h.push("first data row is the worst sample".into());
    write_table(cfg.out.as_deref(), &h, &["re", "im", "min_dist", "pass"], &rows)?;
    let summary = format!(
        "max distance to nearest zero {} vs ε = {} over {} samples, worst at {} + {}i",
        num(report.max_min_dist),
        num(eps),
        report.n_samples,
        num(report.worst.re()),
        num(report.worst.im())
    );
    if report.pass {
        eprintln!("PASS: {summary}");
        Ok(())
    } else {
        Err(CliError::Failed(summary))
    }
}

fn verify_bounds(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    let (spec, _) = obtain(&mut cfg, StackChoice::Uniform)?;
    let StackKind::UniformStack { alpha, beta, rho, .. } = *spec.kind() else {
        return Err(CliError::Usage("verify-bounds needs a uniform stack".into()));
    };
    let tol = set(&mut cfg.tol, 1e-9);
    let y0 = alpha / rho;
    let y_min = set(&mut cfg.y_min, 1e-3 * y0);
    let y_max = set(&mut cfg.y_max, 1e3 * y0);
    let n = set(&mut cfg.n_points, 10_000);
    if n < 2 || !(y_min < y_max) {
        return Err(CliError::Usage("need n_points ≥ 2 and y_min < y_max".into()));
    }
    let slack = 64.0 * f64::EPSILON;
    let mut rows = Vec::with_capacity(n);
    let mut violations = 0usize;
    let mut first_bad = None;
    for k in 0..n {
        let y = if k == n - 1 {
            y_max
        } else {
            (y_min.ln() + (y_max.ln() - y_min.ln()) * k as f64 / (n - 1) as f64).exp()
        };
        let m = spec.log_modulus(&Point::imaginary(y)?, tol)?.exp();
        let lower = if y <= 0.999 * y0 {
            Some(lemma4_lower_bound(alpha, beta, rho, y)?)
        } else {
            None
        };
        let upper = if y > y0 {
            Some(lemma4_upper_bound(alpha, beta, rho, y)?)
        } else {
            None
        };
        let ok = lower.is_none_or(|l| m.hi >= l * (1.0 - slack)) && upper.is_none_or(|u| m.lo <= u * (1.0 + slack));
        if !ok {
            violations += 1;
            first_bad.get_or_insert(y);
        }
        rows.push(vec![
            num(y),
            opt_num(lower),
            num(m.lo),
            num(m.hi),
            opt_num(upper),
            ok.to_string(),
        ]);
    }
    let h = header(ctx, &cfg, Some(&spec));
    write_table(
        cfg.out.as_deref(),
        &h,
        &["y", "lower_bound", "modulus_lo", "modulus_hi", "upper_bound", "pass"],
        &rows,
    )?;
    match first_bad {
        None => {
            eprintln!("PASS: {n} points, no bound violations");
            Ok(())
        }
        Some(y) => Err(CliError::Failed(format!(
            "{violations} of {n} points violate a bound, first at y = {}",
            num(y)
        ))),
    }
}

fn region(cfg: &mut RunConfig) -> Result<GridRegion<f64>, CliError> {
    let re = set(&mut cfg.re_range, vec![-4.0, 4.0]);
    let im = set(&mut cfg.im_range, vec![1e-2, 1e4]);
    Ok(GridRegion::new(
        (re[0], re[1]),
        (im[0], im[1]),
        set(&mut cfg.n_re, 200),
        set(&mut cfg.n_im, 200),
        set(&mut cfg.log_im, true),
    )?)
}

fn corona(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    let (spec, w) = obtain(&mut cfg, StackChoice::Uniform)?;
    let f_zeros = match cfg.delta {
        Some(d) => sparse_witness_product(&spec, d)?.f_zeros,
        None => w.f_zeros,
    };
    let g = region(&mut cfg)?;
    let m = corona_eta(&f_zeros, &spec, &g.points())?;
    eprintln!(
        "min |f| + |B| = {} at {} + {}i",
        num(m.value),
        num(m.argmin.re()),
        num(m.argmin.im())
    );
    let row = vec![
        opt_num(cfg.delta),
        f_zeros.len().to_string(),
        num(m.value),
        num(m.argmin.re()),
        num(m.argmin.im()),
    ];
    let h = header(ctx, &cfg, Some(&spec));
    write_table(cfg.out.as_deref(), &h, &["delta", "f_zeros", "eta", "re", "im"], &[row])
}

fn gmn(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    let (spec, _) = obtain(&mut cfg, StackChoice::Uniform)?;
    let eps_list = set(&mut cfg.epsilon_list, vec![0.5]);
    let pts = region(&mut cfg)?.points();
    let mut rows = Vec::new();
    for &e in &eps_list {
        if !(e > 0.0 && e < 1.0) {
            return Err(CliError::Usage(format!("epsilon {e} outside (0, 1)")));
        }
        let r = gmn_eta_of_epsilon(&spec, e, &pts)?;
        rows.push(vec![
            num(e),
            opt_num(r.map(|m| m.value)),
            opt_num(r.map(|m| m.argmin.re())),
            opt_num(r.map(|m| m.argmin.im())),
        ]);
    }
    let mut h = header(ctx, &cfg, Some(&spec));
    h.push("eta is min |B| over grid points at distance ≥ epsilon from every zero; empty when none qualify".into());
    write_table(cfg.out.as_deref(), &h, &["epsilon", "eta", "re", "im"], &rows)
}

fn witness(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    let (spec, w) = obtain(&mut cfg, StackChoice::Uniform)?;
    let tol = set(&mut cfg.tol, 1e-9);
    let mut rows = Vec::new();
    for (n, v) in w.v.iter().enumerate() {
        let l = spec.log_modulus(v, tol)?;
        let m = l.exp();
        let (d, _) = spec.nearest_zero(v);
        rows.push(vec![
            n.to_string(),
            num(v.re()),
            num(v.im()),
            num(m.lo),
            num(m.hi),
            num((-l.hi).exp_m1()),
            num(d),
        ]);
    }
    let h = header(ctx, &cfg, Some(&spec));
    write_table(
        cfg.out.as_deref(),
        &h,
        &["n", "re", "im", "modulus_lo", "modulus_hi", "divergence", "min_dist"],
        &rows,
    )
}

fn sweep_c1(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    let (spec, _) = obtain(&mut cfg, StackChoice::Adaptive)?;
    let deltas = set(&mut cfg.delta_list, vec![0.7, 0.8, 0.9, 1.0]);
    let n_list = set(&mut cfg.n_list, vec![10, 20, 40]);
    let opts = DeltaSweepOptions {
        zeros_per_side: set(&mut cfg.zeros_per_side, 10),
        corona_c: set(&mut cfg.corona_c, 1.0),
    };
    let mut rows = Vec::new();
    for &n in &n_list {
        for r in delta_sweep(&spec, &deltas, n, opts)? {
            rows.push(vec![
                num(r.delta),
                r.n.to_string(),
                num(r.sigma_min),
                num(r.inverse_norm),
                opt_num(r.eta),
                opt_num(r.c1_upper),
                num(r.gram_condition),
            ]);
        }
    }
    let mut h = header(ctx, &cfg, Some(&spec));
    h.push("inverse_norm is the largest over admissible test functions; eta and c1_upper are empty at or below the threshold".into());
    write_table(
        cfg.out.as_deref(),
        &h,
        &[
            "delta",
            "N",
            "sigma_min",
            "inverse_norm",
            "eta",
            "c1_upper",
            "gram_condition",
        ],
        &rows,
    )
}

fn ric_demo(ctx: &Context, mut cfg: RunConfig) -> Result<(), CliError> {
    let (spec, w) = obtain(&mut cfg, StackChoice::Adaptive)?;
    let r = set(&mut cfg.r, 2);
    let j_list = set(&mut cfg.j_list, vec![3, 6, 10, 12]);
    let k = set(&mut cfg.zeros_per_side, 1);
    let j_max = j_list.iter().copied().max().unwrap_or(1);
    let mut blocks = 1;
    while blocks * (blocks + 1) / 2 < j_max {
        blocks += 1;
    }
    let zeros = section_zeros(&spec, k)?;
    if zeros.len() < blocks {
        return Err(CliError::Usage(format!(
            "J = {j_max} needs {blocks} zeros, only {} materialised; raise zeros_per_side",
            zeros.len()
        )));
    }
    let zeros = &zeros[..blocks];
    let base = build_section(zeros, &adjoint_targets(&w.f_zeros, zeros)?)?;
    let table = decay_table(&BlockOperator::new(base, blocks)?, r, &j_list)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|d| {
            vec![
                d.r.to_string(),
                d.j.to_string(),
                num(d.best_value),
                d.partitions_searched.to_string(),
            ]
        })
        .collect();
    let h = header(ctx, &cfg, Some(&spec));
    write_table(
        cfg.out.as_deref(),
        &h,
        &["r", "J", "best_value", "partitions_searched"],
        &rows,
    )
}

fn circles_path(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.circles.clone().or_else(|| {
        let out: &Path = cfg.out.as_deref()?;
        Some(out.with_extension("circles.csv"))
    })
}

fn figure1(ctx: &Context, cfg: &mut RunConfig) -> Result<(), CliError> {
    let (spec, _) = obtain(cfg, StackChoice::Uniform)?;
    let k = set(&mut cfg.zeros_per_side, 4) as i64;
    let mut rows = Vec::new();
    for (level, range) in spec.level_ranges().into_iter().enumerate() {
        for i in range {
            for kk in -k..k {
                let z = spec.rows()[i].zero(kk);
                rows.push(vec![level.to_string(), kk.to_string(), num(z.re()), num(z.im())]);
            }
        }
    }
    let h = header(ctx, cfg, Some(&spec));
    write_table(cfg.out.as_deref(), &h, &["level", "k", "re", "im"], &rows)?;
    let eps = spec_threshold(&spec)?;
    let mut circ = Vec::new();
    for row in spec.rows().iter().take(2) {
        for kk in [-1, 0] {
            let lam = row.zero(kk);
            let (c, rad) = pseudo_circle(&lam, eps)?;
            circ.push(vec![num(lam.re()), num(lam.im()), num(c.re), num(c.im), num(rad)]);
        }
    }
    if let Some(p) = circles_path(cfg) {
        let mut h = header(ctx, cfg, Some(&spec));
        h.push(format!(
            "circles |b_λ(z)| = {} around the four zeros nearest the axis in the two lowest rows",
            num(eps)
        ));
        write_table(
            Some(&p),
            &h,
            &["lambda_re", "lambda_im", "center_re", "center_im", "radius"],
            &circ,
        )?;
    }
    Ok(())
}
