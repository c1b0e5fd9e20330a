//! In-process invariant suite behind `gsd selftest`.

use gsd_core::classify::classify_all;
use gsd_core::dispersion::k;
use gsd_core::jacobi::{build, eigenvalues_truncated, factorization_residual, sign_normalize, JacobiFlavor, Which};
use gsd_core::krein::{
    eigenvalues_secular, explicit_lattice, transfer_oracle, weyl_limit_error, End, RealizationSpec,
};
use gsd_core::states::{defect_state, green_residual, inner_product, linear_interpolant, Block, BoundaryFlavor, Model};
use gsd_core::weyl::{
    block_spectrum, gamma_apply, weyl_derivative_gap_center, weyl_eval, weyl_eval_offset, BlockKind, BlockSpectrum, WeylBlock,
};
use gsd_core::{build_lattice, Count, InteractionKind, Interval, ModelConfig, SequenceRule, StrengthSeq, C64};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// Outcome of one suite. `worst` is the largest observed error divided by
/// its tolerance, so a suite passes when `worst ≤ 1`.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub detail: String,
}

type Check = Result<(f64, String), String>;

fn suite(name: &'static str, f: impl FnOnce() -> Check) -> SuiteResult {
    match f() {
        Ok((worst, detail)) => SuiteResult { name, passed: worst <= 1.0, worst, detail },
        Err(detail) => SuiteResult { name, passed: false, worst: f64::NAN, detail },
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cz(r: &mut StdRng, lo: f64, hi: f64, im_lo: f64, im_hi: f64) -> C64 {
    C64::new(r.random_range(lo..hi), r.random_range(im_lo..im_hi))
}

fn branch(r: &mut StdRng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let c = r.random_range(0.3..4.0);
        let z = cz(r, -8.0, 8.0, 0.01, 4.0);
        let z = if r.random_bool(0.5) { z.conj() } else { z };
        let a = k(z.conj(), c);
        let b = -k(z, c).conj();
        worst = worst.max((a - b).norm() / (1.0 + a.norm()) / 1e-13);
        // Im k > 0 everywhere off the cuts
        if k(z, c).im <= 0.0 {
            return Err(format!("Im k(z) <= 0 at z = {z}"));
        }
    }
    Ok((worst, "200 points: k(conj z) = -conj k(z)".into()))
}

fn green(r: &mut StdRng) -> Check {
    let mut worst: f64 = 0.0;
    for flavor in BoundaryFlavor::ALL {
        let model = if flavor.is_dirac() { Model::Dirac { c: 1.3 } } else { Model::Schrodinger };
        for _ in 0..50 {
            let left = r.random_range(-2.0..2.0);
            let block = match flavor {
                BoundaryFlavor::HalfLineLeft | BoundaryFlavor::SchrodingerHalfLineLeft => Block::HalfLineLeft { a: left },
                BoundaryFlavor::HalfLineRight | BoundaryFlavor::SchrodingerHalfLineRight => {
                    Block::HalfLineRight { b: left }
                }
                _ => Block::Interval { left, d: r.random_range(0.2..2.0) },
            };
            let mut w = || cz(r, -1.0, 1.0, -1.0, 1.0);
            let (w1, w2, w3, w4) = (w(), w(), w(), w());
            let f = defect_state(model, block, cz(r, -4.0, 4.0, 0.1, 3.0), (w1, w2)).map_err(err)?;
            let g = defect_state(model, block, cz(r, -4.0, 4.0, 0.1, 3.0), (w3, w4)).map_err(err)?;
            worst = worst.max(green_residual(&f, &g, flavor).map_err(err)? / 1e-10);
        }
    }
    Ok((worst, "8 flavors x 50 defect pairs".into()))
}

fn kinds(d: f64) -> [BlockKind; 6] {
    [
        BlockKind::DiracInterval { d },
        BlockKind::DiracHalflineLeft,
        BlockKind::DiracHalflineRight,
        BlockKind::SchrodingerInterval { d },
        BlockKind::SchrodingerHalflineLeft,
        BlockKind::SchrodingerHalflineRight,
    ]
}

fn nevanlinna(r: &mut StdRng) -> Check {
    let mut worst: f64 = 0.0;
    for kind in kinds(0.9) {
        let block = WeylBlock::new(kind, false, 1.2).at(0.3);
        let n = kind.dim();
        for _ in 0..10 {
            let (z, zeta) = (cz(r, -3.0, 3.0, 0.1, 2.0), cz(r, -3.0, 3.0, 0.1, 2.0));
            let lhs = weyl_eval(&block, z).map_err(err)? - weyl_eval(&block, zeta).map_err(err)?.adjoint();
            let basis = |w: C64| -> Result<Vec<_>, String> {
                (0..n)
                    .map(|j| {
                        let mut e = vec![C64::new(0.0, 0.0); n];
                        e[j] = C64::new(1.0, 0.0);
                        gamma_apply(&block, w, &e).map_err(err)
                    })
                    .collect()
            };
            let (gz, gzeta) = (basis(z)?, basis(zeta)?);
            for i in 0..n {
                for j in 0..n {
                    let rhs = (z - zeta.conj()) * inner_product(&gz[j], &gzeta[i]).map_err(err)?;
                    worst = worst.max((lhs[(i, j)] - rhs).norm() / (1.0 + rhs.norm()) / 1e-9);
                }
            }
        }
    }
    Ok((worst, "6 block kinds x 10 (z, zeta) pairs".into()))
}

fn gap_center() -> Check {
    let mut worst: f64 = 0.0;
    for &d in &[1e-3, 0.1, 1.0, 10.0] {
        for &c in &[0.5, 2.0, 100.0] {
            let block = WeylBlock::new(BlockKind::DiracInterval { d }, true, c);
            // evaluate at offsets from c²/2 so large c loses no digits
            let at = |t: f64| weyl_eval_offset(&block, C64::new(t, 0.0)).map_err(err);
            let m0 = at(0.0)?;
            worst = worst.max(m0.iter().map(|x| x.norm()).fold(0.0, f64::max) / 1e-14);
            let exact = weyl_derivative_gap_center(d, c).map_err(err)?;
            let ev = exact.symmetric_eigen().eigenvalues;
            if ev.min() < 1.0 / 16.0 || ev.max() > 192.0 {
                return Err(format!("M'(c^2/2) outside [1/16, 192] at d = {d}, c = {c}"));
            }
            let h = 1e-4 / (d.max(1.0).powi(2) * d.min(1.0));
            let (mp, mm) = (at(h)?, at(-h)?);
            for i in 0..2 {
                for j in 0..2 {
                    let fd = ((mp[(i, j)] - mm[(i, j)]) / (2.0 * h)).re;
                    worst = worst.max((fd - exact[(i, j)]).abs() / exact[(i, j)].abs() / 1e-6);
                }
            }
        }
    }
    Ok((worst, "M(c^2/2) = 0 and M'(c^2/2) vs finite differences on a (d, c) grid".into()))
}

fn block_poles() -> Check {
    let mut worst: f64 = 0.0;
    for &(d, c) in &[(1.0, 1.0), (0.5, 2.0), (3.0, 0.7)] {
        let block = WeylBlock::new(BlockKind::DiracInterval { d }, false, c);
        let BlockSpectrum::Discrete(ev) = block_spectrum(&block, 10) else {
            return Err("interval block without discrete spectrum".into());
        };
        for e in ev {
            let disp = gsd_core::dispersion::Dispersion::at(C64::new(e, 0.0), c);
            worst = worst.max(disp.cos_kd(d).norm() / (1.0 + e.abs()) / 1e-10);
        }
    }
    Ok((worst, "cos(d k(e)) at closed-form eigenvalues, j <= 10".into()))
}

fn jacobi(r: &mut StdRng) -> Check {
    let mut worst: f64 = 0.0;
    for flavor in JacobiFlavor::LATTICE_FLAVORS {
        let l = build_lattice(0.0, SequenceRule::power(r.random_range(0.5..2.0), 1.0), Count::Infinite).map_err(err)?;
        let prefix = (0..120).map(|_| r.random_range(-3.0..3.0)).collect();
        let rule = SequenceRule::with_prefix(prefix, SequenceRule::constant(1.0));
        let s = if flavor.is_beta() { StrengthSeq::beta(rule) } else { StrengthSeq::alpha(rule) }.map_err(err)?;
        let op = build(flavor, &l, &s, 1.1).map_err(err)?;
        worst = worst.max(factorization_residual(&op, 50).map_err(err)? / 1e-12);
        let a = eigenvalues_truncated(&op, 100, Which::All).map_err(err)?;
        let b = eigenvalues_truncated(&sign_normalize(&op), 100, Which::All).map_err(err)?;
        let dense: DMatrix<f64> = op.dense(100).map_err(err)?;
        let mut reference: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        let scale = 1.0 + reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for ((x, y), z) in a.iter().zip(&b).zip(&reference) {
            worst = worst.max((x - y).abs() / scale / 1e-10).max((x - z).abs() / scale / 1e-9);
        }
    }
    Ok((worst, "factorization, sign normalization and dense reference, 4 flavors".into()))
}

fn classifier() -> Check {
    let cfg = |c, right| ModelConfig::new(c, Interval { left: 0.0, right }, InteractionKind::Delta).map_err(err);
    // ℝ₊: self-adjoint for any strengths
    let l = build_lattice(0.0, SequenceRule::power(1.0, 0.0), Count::Infinite).map_err(err)?;
    let s = StrengthSeq::alpha(SequenceRule::general(1.0, 1.0, 3.0, 0.0)).map_err(err)?;
    let rep = classify_all(&cfg(1.0, f64::INFINITY)?, &l, &s).map_err(err)?;
    if !rep.self_adjoint.is_yes() {
        return Err("half-line lattice not reported self-adjoint".into());
    }
    // d_n = 2^{-n}, α_n = −3·2ⁿ + 1
    let l = build_lattice(0.0, SequenceRule::geometric(0.5, 0.5), Count::Infinite).map_err(err)?;
    let a = SequenceRule::sum(vec![SequenceRule::general(-3.0, 2.0, 0.0, 0.0), SequenceRule::constant(1.0)]);
    let rep = classify_all(&cfg(1.0, 1.0)?, &l, &StrengthSeq::alpha(a).map_err(err)?).map_err(err)?;
    let h = rep.schrodinger.as_ref().and_then(|h| h.deficiency_indices);
    if !rep.self_adjoint.is_yes() || h != Some(1) {
        return Err(format!("geometric example: D self-adjoint {:?}, n±(H) {h:?}", rep.self_adjoint.value));
    }
    Ok((0.0, "half-line and geometric-lattice examples".into()))
}

fn secular(r: &mut StdRng) -> Check {
    let mut worst: f64 = 0.0;
    for case in 0..5 {
        let n = 1 + case % 4;
        let gaps = (0..=n).map(|_| r.random_range(0.3..1.2)).collect();
        let mut st: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        if case == 3 {
            st[1] = f64::INFINITY;
        }
        let rule = SequenceRule::explicit(st);
        let s = if case == 4 { StrengthSeq::beta(rule) } else { StrengthSeq::alpha(rule) }.map_err(err)?;
        let spec =
            RealizationSpec::dirac(1.0, explicit_lattice(0.0, gaps).map_err(err)?, s, End::F2Zero, End::F1Zero)
                .map_err(err)?;
        let a = eigenvalues_secular(&spec, (-10.3, 10.1), 1e-3).map_err(err)?.values();
        let b = transfer_oracle(&spec, (-10.3, 10.1), 1e-3).map_err(err)?.values();
        if a.len() != b.len() {
            return Err(format!("case {case}: {} secular vs {} oracle roots", a.len(), b.len()));
        }
        worst = a.iter().zip(&b).fold(worst, |m, (x, y)| m.max((x - y).abs() / 1e-8));
    }
    Ok((worst, "5 configurations incl. +inf and beta".into()))
}

fn negation(r: &mut StdRng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let c = r.random_range(0.7..2.0);
        let gaps: Vec<f64> = (0..3).map(|_| r.random_range(0.3..1.2)).collect();
        let b: Vec<f64> = (0..2).map(|_| r.random_range(-1.0..1.0)).collect();
        let spec = |s: StrengthSeq, l: End, rt: End| {
            RealizationSpec::dirac(c, explicit_lattice(0.0, gaps.clone()).map_err(err)?, s, l, rt).map_err(err)
        };
        let beta = spec(StrengthSeq::beta(SequenceRule::explicit(b.clone())).map_err(err)?, End::F2Zero, End::F1Zero)?;
        let hat = SequenceRule::explicit(b.iter().map(|x| c * c * x).collect());
        let alpha = spec(StrengthSeq::alpha(hat).map_err(err)?, End::F1Zero, End::F2Zero)?;
        let w = (-9.87, 9.87);
        let x = transfer_oracle(&beta, w, 1e-3).map_err(err)?.values();
        let mut y: Vec<f64> = transfer_oracle(&alpha, w, 1e-3).map_err(err)?.values().iter().map(|v| -v).collect();
        y.sort_by(f64::total_cmp);
        if x.len() != y.len() {
            return Err("negated spectra differ in count".into());
        }
        worst = x.iter().zip(&y).fold(worst, |m, (p, q)| m.max((p - q).abs() / 1e-8));
    }
    Ok((worst, "5 configurations".into()))
}

fn nonrel() -> Check {
    let e: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&c| weyl_limit_error(1.0, C64::new(0.0, 1.0), c))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let ratios = [e[0] / e[1], e[1] / e[2]];
    if !(e[1] < e[0] && e[2] < e[1]) || ratios.iter().any(|r| !(50.0..=200.0).contains(r)) {
        return Err(format!("errors {e:?}, ratios {ratios:?}"));
    }
    Ok((0.0, format!("ratios {:.1}, {:.1}", ratios[0], ratios[1])))
}

fn traces(r: &mut StdRng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = r.random_range(2..10);
        let gaps: Vec<f64> = (0..n).map(|_| r.random_range(0.05..2.0)).collect();
        let dmax = gaps.iter().copied().fold(0.0, f64::max);
        let l = explicit_lattice(0.0, gaps).map_err(err)?;
        let mut v = || cz(r, -2.0, 2.0, -2.0, 2.0);
        let ap: Vec<C64> = (0..n).map(|_| v()).collect();
        let am: Vec<C64> = (0..n).map(|_| v()).collect();
        let g = linear_interpolant(&l, &ap, &am).map_err(err)?;
        let t = g.traces();
        let lhs: f64 = (0..n).map(|i| t.jumps[i].norm_sqr() / g.d(i)).sum();
        worst = worst.max((lhs - g.w12_norm_sq()).max(0.0) / g.w12_norm_sq() / 1e-10);
        let lhs: f64 = (0..n).map(|i| g.d(i) * (t.plus[i].norm_sqr() + t.minus[i].norm_sqr())).sum();
        let rhs = 4.0 * (dmax * dmax * g.deriv_norm_sq() + g.norm_sq());
        worst = worst.max((lhs - rhs).max(0.0) / rhs / 1e-10);
    }
    Ok((worst, "contraction and weighted trace bound, 50 interpolants".into()))
}

/// Run every suite with a fixed seed.
pub fn run() -> Vec<SuiteResult> {
    let mut r = StdRng::seed_from_u64(0x6a5d);
    vec![
        suite("branch", || branch(&mut r)),
        suite("green_identity", || green(&mut r)),
        suite("nevanlinna", || nevanlinna(&mut r)),
        suite("gap_center", gap_center),
        suite("block_spectra", block_poles),
        suite("jacobi", || jacobi(&mut r)),
        suite("classifier", classifier),
        suite("secular_vs_oracle", || secular(&mut r)),
        suite("beta_alpha_negation", || negation(&mut r)),
        suite("nonrelativistic_limit", nonrel),
        suite("trace_bounds", || traces(&mut r)),
    ]
}
