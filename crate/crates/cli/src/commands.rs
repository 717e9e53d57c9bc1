use std::fmt::Write as _;

use anyhow::{bail, Result};
use gasket_core::address::SymbolStream;
use gasket_core::cone::{density_along, invariance_check, standard_cone};
use gasket_core::derham::{log_grid, DeRham, DeRhamState};
use gasket_core::edge::{
    det_identity_exhaustive, dual_norm_exhaustive, edge_profile, profile_csv, psd_floor_check, worst_gaps,
};
use gasket_core::energy::{
    cell_rows, find_vanishing_cell, onb_decomposition_check, symmetric_tail_ratio, VanishOptions,
};
use gasket_core::fit::log_slope;
use gasket_core::scalar::format_sig17;
use gasket_core::{Dim, EdgeAddress, HarmonicContext, Report, Scalar, Vector, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::parse_vector;

fn add(report: &mut Report, name: &str, outcome: gasket_core::Result<Report>) {
    match outcome {
        Ok(r) => report.extend(r),
        Err(e) => report.push(name, e.to_string(), false),
    }
}

fn random_word(rng: &mut ChaCha8Rng, dim: Dim, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::new(dim, (0..len).map(|_| rng.gen_range(1..=dim.symbols())).collect()).expect("symbols in range")
}

pub fn verify<T: Scalar>(dim: Dim, depth: usize, seed: u64, corrupt: bool) -> Result<Report> {
    let mut ctx = HarmonicContext::<T>::for_dim(dim);
    if corrupt {
        ctx = ctx.perturbed(1, 0, 1, T::ratio(1, 7))?;
    }
    let size = ctx.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ctx.eigen_check();
    report.extend(ctx.transition_check());
    for k in 1..=size {
        let samples: Vec<(Word, Word, usize)> = (0..4)
            .map(|_| (random_word(&mut rng, dim, 3), random_word(&mut rng, dim, 3), rng.gen_range(1..=size)))
            .collect();
        add(&mut report, "psd floor", psd_floor_check(&ctx, k, &samples));
    }
    let u = Vector::new((0..size).map(|_| T::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=7))).collect());
    let start = random_word(&mut rng, dim, 2);
    add(&mut report, "determinant identity", det_identity_exhaustive(&ctx, &u, &start, 1, 2, depth));
    add(&mut report, "dual norm floor", dual_norm_exhaustive(&ctx, 1, 2, depth));

    // signed permutation of the standard basis
    let mut order: Vec<usize> = (1..=size).collect();
    order.shuffle(&mut rng);
    let basis: Vec<Vector<T>> = order
        .iter()
        .map(|&k| {
            let e = ctx.e(k).expect("symbol in range");
            if rng.gen() {
                e
            } else {
                Vector::new(e.iter().map(|x| -x.clone()).collect())
            }
        })
        .collect();
    let words: Vec<Word> = (0..=3).flat_map(|m| Word::all_of_length(dim, m)).collect();
    add(&mut report, "orthonormal decomposition", onb_decomposition_check(&ctx, &basis, &words, 1e-10));

    report.extend(DeRham::new(dim).inverse_branch_contraction_check());
    match standard_cone(&ctx, 1, 2) {
        Ok(frame) => add(&mut report, "cone invariance", invariance_check(&ctx, &frame)),
        Err(_) => report.skip("cone invariance", format!("N={} unsupported", dim.get())),
    }
    Ok(report)
}

pub fn profile<T: Scalar>(dim: Dim, edge: &str, u: &str, depth: u32) -> Result<String> {
    let ctx = HarmonicContext::<T>::for_dim(dim);
    let edge = EdgeAddress::parse(dim, edge)?;
    let u = parse_vector::<T>(u, ctx.size())?;
    Ok(profile_csv(&edge_profile(&ctx, &u, &edge, depth)?))
}

pub fn cells<T: Scalar>(dim: Dim, u: &str, m: usize) -> Result<String> {
    let ctx = HarmonicContext::<T>::for_dim(dim);
    let u = parse_vector::<T>(u, ctx.size())?;
    let mut out = String::from("word,nu_h,nu,ratio\n");
    for row in cell_rows(&ctx, &u, m)? {
        let word = if row.word.is_empty() { "∅".to_string() } else { row.word.to_string() };
        writeln!(out, "{word},{},{},{}", row.nu_h.to_text(), row.nu.to_text(), row.ratio.to_text())?;
    }
    Ok(out)
}

fn log_text(x: f64) -> String {
    if x > 0.0 {
        format_sig17(x.ln())
    } else {
        "-inf".into()
    }
}

pub fn tail_decay<T: Scalar>(
    dim: Dim,
    u: &str,
    word: &str,
    i: usize,
    j: usize,
    n_max: usize,
    fit_from: usize,
) -> Result<(String, String)> {
    if n_max > 60 {
        bail!("n-max {n_max} exceeds 60");
    }
    let ctx = HarmonicContext::<T>::for_dim(dim);
    let u = parse_vector::<T>(u, ctx.size())?;
    let w = Word::parse(dim, word)?;
    let tail = symmetric_tail_ratio(&ctx, &u, &w, i, j, n_max, fit_from.min(n_max)..=n_max)?;
    let mut csv = String::from("n,ratio,log_ratio\n");
    for row in &tail.rows {
        writeln!(csv, "{},{},{}", row.n, format_sig17(row.ratio), log_text(row.ratio))?;
    }
    let mut summary = String::new();
    match tail.ratio_fit {
        Some(fit) => writeln!(summary, "ratio slope {:.6} (predicted {:.6})", fit.slope, tail.predicted_ratio_slope)?,
        None => writeln!(summary, "ratio slope: fit skipped (no positive ratios)")?,
    }
    match tail.energy_fit {
        Some(fit) => writeln!(summary, "energy slope {:.6} (predicted {:.6})", fit.slope, tail.predicted_energy_slope)?,
        None => writeln!(summary, "energy slope: fit skipped (no positive energies)")?,
    }
    Ok((csv, summary))
}

pub fn gap_decay<T: Scalar>(
    dim: Dim,
    u: &str,
    word: &str,
    i: usize,
    j: usize,
    n_max: usize,
) -> Result<(String, String)> {
    let ctx = HarmonicContext::<T>::for_dim(dim);
    let u = parse_vector::<T>(u, ctx.size())?;
    let w = Word::parse(dim, word)?;
    let gaps: Vec<f64> = worst_gaps(&ctx, &u, &w, i, j, n_max)?.iter().map(Scalar::to_f64).collect();
    let mut csv = String::from("n,gap,log_gap\n");
    for (n, g) in gaps.iter().enumerate() {
        writeln!(csv, "{n},{},{}", format_sig17(*g), log_text(*g))?;
    }
    let points: Vec<(f64, f64)> = gaps.iter().enumerate().skip(1).map(|(n, &g)| (n as f64, g)).collect();
    let n = dim.get() as f64;
    let predicted = (n / (n + 1.0)).ln();
    let summary = match log_slope(&points) {
        Some(fit) => format!("gap slope {:.6} (bound {predicted:.6})\n", fit.slope),
        None => "gap slope: fit skipped (no positive gaps)\n".to_string(),
    };
    Ok((csv, summary))
}

pub fn maxloc(dim: Dim, count: usize, decades: f64) -> Result<String> {
    let d = DeRham::new(dim);
    let mut out = String::from("s,M(s)\n");
    for s in log_grid(dim, count, decades) {
        writeln!(out, "{},{}", format_sig17(s), format_sig17(d.m_eval(s)))?;
    }
    Ok(out)
}

pub fn maxloc_inverse(dim: Dim, target: f64) -> Result<String> {
    let s = DeRham::new(dim).m_inverse(target)?;
    Ok(format!("M(s),s\n{},{}\n", format_sig17(target), format_sig17(s)))
}

pub fn derham(dim: Dim, depth: u32, iterations: u32) -> Result<String> {
    if depth > 20 {
        bail!("depth {depth} exceeds 20");
    }
    let d = DeRham::new(dim);
    let state = DeRhamState::<f64>::compute(&d, depth, iterations);
    let size = (1u64 << depth) as f64;
    let mut out = String::from("t,L(t)\n");
    for (m, v) in state.values.iter().enumerate() {
        writeln!(out, "{},{}", format_sig17(m as f64 / size), format_sig17(*v))?;
    }
    Ok(out)
}

pub fn cone_density<T: Scalar>(dim: Dim, edge: &str, u: &str, omega: &str, tail: usize, tol: f64) -> Result<String> {
    let ctx = HarmonicContext::<T>::for_dim(dim);
    let edge = EdgeAddress::parse(dim, edge)?;
    let u = parse_vector::<T>(u, ctx.size())?;
    let frame = standard_cone(&ctx, edge.i(), edge.j())?;
    let omega = SymbolStream::eventually_constant(Word::parse(dim, omega)?, tail)?;
    let limit = density_along(&ctx, &frame, &edge, &u, &omega, tol)?;
    let mut out = String::new();
    writeln!(out, "density {}", format_sig17(limit.value))?;
    writeln!(out, "iterations {}", limit.rho.iterations)?;
    writeln!(out, "certificate {}", format_sig17(limit.rho.final_bound()))?;
    for (l, x) in limit.lambda.iter().enumerate() {
        writeln!(out, "lambda_{} {}", l + 1, format_sig17(*x))?;
    }
    Ok(out)
}

pub fn vanish<T: Scalar>(dim: Dim, u: &str, word: &str, eps: f64) -> Result<String> {
    let ctx = HarmonicContext::<T>::for_dim(dim);
    let u = parse_vector::<T>(u, ctx.size())?;
    let w = Word::parse(dim, word)?;
    let witness = find_vanishing_cell(&ctx, &u, &w, eps, VanishOptions::default())?;
    let cell = w.concat(&witness.word)?;
    Ok(format!(
        "cell {}\nlength {}\nratio {}\nstrategy {}\n",
        if cell.is_empty() { "∅".to_string() } else { cell.to_string() },
        cell.len(),
        witness.ratio.to_text(),
        witness.strategy
    ))
}
