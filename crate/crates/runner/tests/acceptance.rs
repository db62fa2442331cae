//! The ten end-to-end acceptance checks. Runs without the test harness so
//! every criterion prints exactly one PASS/FAIL line.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kt_core::ed::frames::{rotation_matrix, sublattice_matrix};
use kt_core::ed::symmetry::{parity, translation};
use kt_core::ed::{
    build_hamiltonian, build_symmetries, oracle_bands, oracle_dispersion, parity_energies, transformed_frame,
    wavefunction_residual, Frame,
};
use kt_core::lattice::{kink_set, AlphaTable, WeightTable};
use kt_core::{
    compute_h, from_interface, residual_ground, solve_ground, solve_interface, DispersionSeries, ModelKind, ModelSpec,
    SeamExpansion, SiteSet, TruncationPolicy,
};
use kt_runner::output::write_report;
use kt_runner::pipeline::CellReport;
use kt_runner::{run_sweep, ExperimentConfig, OutputFormat, Pipeline};
use nalgebra::DMatrix;

const AF: [ModelKind; 2] = [ModelKind::XzAf, ModelKind::XxzAf];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn ed_parity(model: ModelKind, n: usize, eps: f64) -> (f64, f64) {
    let spec = ModelSpec::uniform(model, n, eps);
    let h = build_hamiltonian(&spec, transformed_frame(&spec)).unwrap();
    let (_, p) = build_symmetries(&spec).unwrap();
    parity_energies(&h, &p).unwrap()
}

fn kt_series(model: ModelKind, n: usize, eps: f64, w_max: u32) -> DispersionSeries {
    let policy = TruncationPolicy::with_w_max(w_max);
    let seam = if model.is_af() {
        compute_h(&solve_ground(&ModelSpec::uniform(model, n, eps), &policy).unwrap(), &policy).unwrap()
    } else {
        SeamExpansion::zero(model, n, eps)
    };
    let sol = solve_interface(&seam, &ModelSpec::interface(model, n, eps), &policy).unwrap();
    from_interface(&sol).unwrap()
}

fn ed_series(model: ModelKind, n: usize, eps: f64) -> DispersionSeries {
    oracle_dispersion(&ModelSpec::interface(model, n, eps)).unwrap()
}

fn ground_oracle_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for model in AF {
        for n in [6usize, 8, 10] {
            for eps in [0.02, 0.05, 0.1] {
                let start = Instant::now();
                let policy = TruncationPolicy::with_w_max(n as u32 / 2 + 2);
                let sol = solve_ground(&ModelSpec::uniform(model, n, eps), &policy).unwrap();
                slowest = slowest.max(start.elapsed());
                let (ep, em) = ed_parity(model, n, eps);
                worst = worst.max((sol.e_plus - ep).abs()).max((sol.e_minus - em).abs());
            }
        }
    }
    check(
        worst <= 1e-6 && slowest <= Duration::from_secs(60),
        format!("max |ΔE±| = {worst:.2e}, slowest cell {slowest:.2?}"),
    )
}

fn pointwise_residual() -> Outcome {
    let spec = ModelSpec::<f64>::uniform(ModelKind::XzAf, 9, 0.05);
    let res: Vec<f64> = [3, 5, 7]
        .iter()
        .map(|&w| {
            let sol = solve_ground(&spec, &TruncationPolicy::with_w_max(w)).unwrap();
            let r = residual_ground(&sol, &spec).unwrap();
            r.max_dev_even.max(r.max_dev_odd)
        })
        .collect();
    let monotone = res.windows(2).all(|w| w[1] < w[0]);
    check(res[2] <= 1e-8 && monotone, format!("residuals at w_max 3/5/7: {}", sci(&res)))
}

fn parity_splitting() -> Outcome {
    let split: Vec<f64> = [4usize, 6, 8, 10]
        .iter()
        .map(|&n| {
            let (ep, em) = ed_parity(ModelKind::XzAf, n, 0.1);
            (ep - em).abs()
        })
        .collect();
    let ratios: Vec<f64> = split.windows(2).map(|w| w[1] / w[0]).collect();
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    check(hi <= 0.1 && hi <= 3.0 * lo, format!("splittings {}, ratios {}", sci(&split), sci(&ratios)))
}

fn af_instability() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for model in AF {
        let e2_at = |eps: f64| ed_series(model, 9, eps).coeff(2);
        let rel = (e2_at(0.02) / 0.02 - 1.0).abs();
        let xs = [0.01, 0.02, 0.04];
        let ys: Vec<f64> = xs.iter().map(|&e| e2_at(e) / e).collect();
        let mx = xs.iter().sum::<f64>() / 3.0;
        let my = ys.iter().sum::<f64>() / 3.0;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        let intercept = my - slope * mx;
        let exact = ed_series(model, 9, 0.05);
        let kt = kt_series(model, 9, 0.05, 7);
        let diff = (kt.coeff(2) - exact.coeff(2)).abs();
        let (bw_ed, bw_kt) = (exact.bandwidth(), kt.bandwidth());
        ok &= rel <= 0.25
            && (0.95..=1.05).contains(&intercept)
            && diff <= 1e-5
            && bw_ed >= 3.0 * 0.05
            && bw_kt >= 3.0 * 0.05;
        lines.push(format!(
            "{model}: |e2/ε-1| = {rel:.3}, intercept {intercept:.4}, |Δe2| = {diff:.1e}, bandwidth {bw_ed:.4}"
        ));
    }
    check(ok, lines.join("; "))
}

fn af_coefficient_decay() -> Outcome {
    let eps = 0.05;
    let d = kt_series(ModelKind::XzAf, 11, eps, TruncationPolicy::default().w_max);
    let (e2, e4, e6) = (d.coeff(2).abs(), d.coeff(4).abs(), d.coeff(6).abs());
    // smallest C with |e4| ≤ |e2|Cε and |e6| ≤ |e2|(Cε)²
    let c = (e4 / (e2 * eps)).max((e6 / e2).sqrt() / eps);
    check(c <= 20.0, format!("e2 = {e2:.3e}, e4 = {e4:.3e}, e6 = {e6:.3e}, C = {c:.3}"))
}

fn ferro_flatness() -> Outcome {
    let eps = 0.1;
    let series: Vec<DispersionSeries> = [7usize, 9, 11].iter().map(|&n| ed_series(ModelKind::XxzFerro, n, eps)).collect();
    let weights: Vec<f64> = series.iter().map(|d| d.off_constant_weight()).collect();
    let ratios: Vec<f64> = weights.windows(2).map(|w| w[1] / w[0]).collect();
    let bw = series[2].bandwidth();
    let kt = kt_series(ModelKind::XxzFerro, 9, eps, TruncationPolicy::default().w_max);
    let diff = (-8..=9).map(|s| (kt.coeff(s) - series[1].coeff(s)).abs()).fold(0.0, f64::max);
    check(
        ratios.iter().all(|&r| r <= 0.1) && bw <= 1e-6 && diff <= 1e-7,
        format!("Σ|e_s| {}, ratios {}, N=11 bandwidth {bw:.1e}, |Δe_s| at N=9 {diff:.1e}", sci(&weights), sci(&ratios)),
    )
}

/// `U` with `U H_frame Uᵀ = H_transformed`, found among the frame maps.
fn frame_map(spec: &ModelSpec, frame: Frame) -> Option<DMatrix<f64>> {
    let n = spec.n_sites;
    let target = build_hamiltonian(spec, transformed_frame(spec)).unwrap().to_dense();
    let h = build_hamiltonian(spec, frame).ok()?.to_dense();
    let s = sublattice_matrix(n).to_dense();
    let r = rotation_matrix(n);
    let id = DMatrix::identity(1 << n, 1 << n);
    let candidates = if spec.model.is_af() {
        vec![id, s.clone(), &s * &r, &s * r.transpose()]
    } else {
        vec![id, r.clone(), r.transpose()]
    };
    candidates.into_iter().find(|u| (u * &h * u.transpose() - &target).amax() < 1e-12)
}

fn symmetry_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut frames = 0;
    for n in [5usize, 7, 9] {
        for model in ModelKind::ALL {
            let spec = ModelSpec::interface(model, n, 0.1);
            let t = translation(&spec);
            let p = parity(n);
            let tm = t.to_matrix();
            let tn = (0..n - 1).fold(tm.clone(), |acc, _| tm.matmul(&acc));
            if tn.max_abs_diff(&p.to_matrix()) != 0.0 || t.pow(2 * n) != p.pow(2) {
                return Err(format!("{model} N={n}: T^N ≠ P or T^2N ≠ I"));
            }
            let t_dense = tm.to_dense();
            for frame in [Frame::Original, Frame::Rotated, Frame::RotatedSublattice] {
                let Ok(h) = build_hamiltonian(&spec, frame) else { continue };
                let Some(u) = frame_map(&spec, frame) else {
                    return Err(format!("{model} N={n}: no map from {frame:?} to the working frame"));
                };
                let h = h.to_dense();
                let tf = u.transpose() * &t_dense * &u;
                worst = worst.max((&h * &tf - &tf * &h).amax());
                frames += 1;
            }
        }
    }
    check(worst <= 1e-12, format!("T^N = P, T^2N = I exact; max |[H,T]| = {worst:.1e} over {frames} frames"))
}

fn combinatorics() -> Outcome {
    let start = Instant::now();
    let mut checked = 0u64;
    for n in 3..=7usize {
        let table = WeightTable::new(n);
        let alpha = AlphaTable::new(n);
        let sets: Vec<SiteSet> = (0..1usize << n).map(|i| SiteSet::from_index(n, i)).collect();
        for &z in &sets {
            let moves = z.interface_sites();
            if moves.len() as i32 != z.n_of() + 1 {
                return Err(format!("nz fails at N={n} Z={z}"));
            }
            for j in (1..=n).filter(|&j| moves.contains(j)) {
                if table.wn(z ^ SiteSet::pair(n, j)) > table.wn(z) + 1 {
                    return Err(format!("wtrid fails at N={n} Z={z} j={j}"));
                }
            }
            for &y in &sets {
                for j in (1..=n).filter(|&j| moves.contains(j)) {
                    let shifted = y.shift(j as i64) ^ z;
                    if table.wn(shifted) > table.wn(y) + table.wn(z) {
                        return Err(format!("wtria fails at N={n} Y={y} Z={z} j={j}"));
                    }
                    if table.wn(shifted ^ SiteSet::pair(n, j)) > table.wn(y) + table.wn(z) + 1 {
                        return Err(format!("wtric fails at N={n} Y={y} Z={z} j={j}"));
                    }
                    checked += 2;
                }
            }
            for s in 0..2 * n as i64 {
                if table.wn(z) > table.wn(z.gen_translate(-s)) + table.wn(kink_set(n, s as usize)) {
                    return Err(format!("wtrib fails at N={n} X={z} s={s}"));
                }
            }
            if let Some(a) = alpha.get(z) {
                for j in (1..=n).filter(|&j| moves.contains(j)) {
                    let y = z ^ SiteSet::pair(n, j);
                    if y.len() % 2 != z.len() % 2 || alpha.get(y).is_none_or(|b| b > a + 1) {
                        return Err(format!("move {z} -> {y} breaks parity or the α bound"));
                    }
                }
            }
        }
        if alpha.get(SiteSet::pair(n, n)) != Some(1) || alpha.beta(2) != Some(n as u32 - 1) {
            return Err(format!("α({{N,1}}) or β₂ wrong at N={n}"));
        }
    }
    let elapsed = start.elapsed();
    check(elapsed <= Duration::from_secs(30), format!("{checked} inequality cases for N ≤ 7 in {elapsed:.2?}"))
}

fn eigenstate_reconstruction() -> Outcome {
    let (n, eps) = (9usize, 0.05);
    let model = ModelKind::XzAf;
    let policy = TruncationPolicy::with_w_max(6);
    let ground = solve_ground(&ModelSpec::uniform(model, n, eps), &policy).unwrap();
    let seam = compute_h(&ground, &policy).unwrap();
    let spec = ModelSpec::interface(model, n, eps);
    let sol = solve_interface(&seam, &spec, &policy).unwrap();
    let bands = oracle_bands(&spec).unwrap();
    let mut worst_res: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut admissible = 0;
    for j in 0..2 * n {
        match wavefunction_residual(Some(&ground), &sol, j, &spec) {
            Ok((res, e)) => {
                admissible += 1;
                let gap = (e - bands.e1[j]).abs();
                if res > 1e-4 || gap > res.max(1e-12) {
                    return Err(format!("k index {j}: residual {res:.2e}, |E - E1| = {gap:.2e}"));
                }
                worst_res = worst_res.max(res);
                worst_gap = worst_gap.max(gap);
            }
            Err(kt_core::Error::DegenerateMomentum(_)) => {}
            Err(e) => return Err(format!("k index {j}: {e}")),
        }
    }
    check(
        admissible > 0,
        format!("{admissible} momenta, max residual {worst_res:.2e}, max |E - E1| {worst_gap:.2e}"),
    )
}

fn determinism_and_serialization() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut files = Vec::new();
    let mut reports = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let cfg = ExperimentConfig {
            model: ModelKind::XzAf,
            n: vec![7, 9],
            epsilon: vec![0.02, 0.05],
            policy: TruncationPolicy::default(),
            pipelines: vec![Pipeline::Ground, Pipeline::Interface, Pipeline::Ed, Pipeline::Crossval],
            out: d.path().to_path_buf(),
            format: OutputFormat::Both,
            workers: Some(1 + 3 * i),
        };
        let report = run_sweep(&cfg).unwrap();
        files.push(write_report(&report).unwrap());
        reports.push(report);
    }
    let mut compared = 0;
    for (a, b) in files[0].iter().zip(&files[1]) {
        if a.file_name() == Some("summary.json".as_ref()) {
            continue; // echoes the output path
        }
        if std::fs::read(a).unwrap() != std::fs::read(b).unwrap() {
            return Err(format!("{} differs between runs", a.display()));
        }
        compared += 1;
    }
    for (cell, path) in reports[0].cells.iter().zip(files[0].iter()) {
        let text = std::fs::read_to_string(path).unwrap();
        let back: CellReport = serde_json::from_str(&text).unwrap();
        if &back != cell {
            return Err(format!("{} does not round-trip", path.display()));
        }
        if serde_json::to_string_pretty(&back).unwrap() + "\n" != text {
            return Err(format!("{} re-serializes differently", path.display()));
        }
    }
    check(compared > 0, format!("{compared} files byte-identical across worker counts; cell JSON round-trips exactly"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("ground-state oracle agreement", ground_oracle_agreement),
        ("pointwise residual", pointwise_residual),
        ("parity splitting", parity_splitting),
        ("antiferromagnet instability", af_instability),
        ("antiferromagnet coefficient decay", af_coefficient_decay),
        ("ferromagnet flatness", ferro_flatness),
        ("symmetry identities", symmetry_identities),
        ("combinatorics", combinatorics),
        ("eigenstate reconstruction", eigenstate_reconstruction),
        ("determinism and serialization", determinism_and_serialization),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{t:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{t:.1?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
