//! Command-line front end: expression normal forms, the Hopf axiom battery,
//! representation and kernel checks, and convention calibration, with JSON
//! reports and a CI-friendly exit-code contract (0 pass, 1 check failure,
//! 2 usage error).

use clap::{Parser, Subcommand};
use hlqg::config::RunConfig;
use hlqg::heisen;
use hlqg::hlrep;
use hlqg::kernels;
use hlqg::linalg::{compress, op_norm, CMat};
use hlqg::quad::QuadSpec;
use hlqg::report::Report;
use hlqg::scalar::GRat;
use hlqg::slpoly;
use hlqg::zcalc;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hlqg", version, about = "verification toolkit for the Heisenberg-Lorentz quantum group at desk scale")]
struct Cli {
    /// TOML config file; missing sections fall back to defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full Hopf axiom battery on the symbolic engine
    Hopf {
        #[command(subcommand)]
        cmd: HopfCmd,
    },
    /// Print the canonical normal form of an expression
    Nf { expr: String },
    /// Representation quadruple checks
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// Heat semigroup vs smeared displacement family
    Heat {
        #[command(subcommand)]
        cmd: HeatCmd,
    },
    /// Kernel evaluations (CSV rows) and the exact shear factorization
    Kernel {
        #[command(subcommand)]
        cmd: KernelCmd,
    },
    /// z-transform calculus checks
    Zcalc {
        #[command(subcommand)]
        cmd: ZcalcCmd,
    },
    /// Convention-toggle calibration
    Calibrate {
        #[command(subcommand)]
        cmd: CalibrateCmd,
    },
}

#[derive(Subcommand)]
enum HopfCmd {
    Verify,
}

#[derive(Subcommand)]
enum RepCmd {
    /// Build both model cases and check all 22 relations
    Build,
    /// Tensor two invertible-gamma quadruples and check relations
    Tensor,
    /// Relations on the invertible-gamma case only
    Check,
    /// Conjugated-shift identity on the active tensor legs
    Shift {
        #[arg(long, default_value_t = 0.5)]
        z_abs: f64,
    },
    /// Four-term expansion of (1+T*T)e^{-A*A-D*D} plus negative control
    Sumt,
    /// Double-smearing identity for e^{-A*A}e^{-D*D}
    Asa1,
}

#[derive(Subcommand)]
enum HeatCmd {
    Direct {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
    Smeared {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
    Compare {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
    },
}

#[derive(Subcommand)]
enum KernelCmd {
    Psi,
    Htilde,
    L,
    Fgen,
    Gw {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ZcalcCmd {
    Roundtrip,
    Commute,
    Product,
    Density,
}

#[derive(Subcommand)]
enum CalibrateCmd {
    Conventions,
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn emit(report: &Report, out: &Option<PathBuf>) -> ExitCode {
    let text = report.to_json();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{text}"),
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_hopf(cfg: RunConfig, out: &Option<PathBuf>) -> ExitCode {
    let hc = hlqg::hopf::check_hopf_axioms();
    let mut report = Report::new(cfg);
    for check in &hc.checks {
        report.push_bool(&check.id, "hopf-structure", check.pass);
    }
    emit(&report, out)
}

fn run_rep(cmd: RepCmd, cfg: RunConfig, out: &Option<PathBuf>) -> ExitCode {
    let s = cfg.numeric.s;
    let tol = cfg.tolerances.clone();
    let mut report = Report::new(cfg.clone());
    let c_one = c64(1.0, 0.0);
    match cmd {
        RepCmd::Build => {
            let n = cfg.numeric.truncation.max(4);
            let qi = hlrep::build_invertible_gamma(c_one, s, n.min(16));
            push_relations(&mut report, "invertible", &hlrep::check_relations(&qi), &tol);
            let qz = hlrep::build_zero_gamma(c64(2.0, 0.0), s, n);
            push_relations(&mut report, "zero-gamma", &hlrep::check_relations(&qz), &tol);
        }
        RepCmd::Check => {
            let n = cfg.numeric.truncation.min(16).max(4);
            let q = hlrep::build_invertible_gamma(c_one, s, n);
            push_relations(&mut report, "invertible", &hlrep::check_relations(&q), &tol);
        }
        RepCmd::Tensor => {
            let n = 6;
            let q = hlrep::build_invertible_gamma(c_one, s, n);
            let t = hlrep::tensor(&q, &q);
            push_relations(&mut report, "tensor", &hlrep::check_relations(&t), &tol);
        }
        RepCmd::Shift { z_abs } => {
            let n = cfg.numeric.truncation.max(8);
            let z = c64(z_abs / 2.0f64.sqrt(), z_abs / 2.0f64.sqrt());
            let r = hlrep::shift_identity_residual(c_one, c_one, s, n, z);
            report.push_residual("shift-identity", "conjugated-shift", r, tol.truncation);
        }
        RepCmd::Sumt => {
            let n = cfg.numeric.truncation.min(16).max(8);
            let q = hlrep::build_invertible_gamma(c_one, s, n);
            report.push_residual(
                "star-sum",
                "star-sum-identity",
                hlrep::check_star_sum_identity(&q),
                tol.exact,
            );
            report.push_residual(
                "sumt-expansion",
                "four-term-expansion",
                hlrep::check_sumt_expansion(&q, false),
                1e-6,
            );
            let bad = hlrep::check_sumt_expansion(&q, true);
            report.push_bool("sumt-negative-control", "four-term-expansion", bad > 1e-3);
        }
        RepCmd::Asa1 => {
            let n = cfg.numeric.truncation.max(8);
            let c = c64((2.0f64 / s.abs()).sqrt(), 0.0);
            let q = hlrep::build_invertible_gamma(c, s, n);
            let r = hlrep::check_asa1_smearing(&q, &cfg.quadrature);
            report.push_residual("asa1-smearing", "double-smearing", r, tol.truncation);
        }
    }
    emit(&report, out)
}

fn push_relations(
    report: &mut Report,
    label: &str,
    rel: &hlrep::RelationReport,
    tol: &hlqg::config::ToleranceSection,
) {
    for e in &rel.entries {
        let threshold = match e.class {
            hlrep::RelClass::ExactByConstruction => tol.exact,
            hlrep::RelClass::TruncationLimited => tol.truncation,
        };
        report.push_residual(
            &format!("{label}:{}", e.name),
            "generator-relations",
            e.residual,
            threshold,
        );
    }
    report.push_residual(
        &format!("{label}:det"),
        "generator-relations",
        rel.det_residual,
        tol.exact.max(tol.truncation),
    );
}

fn run_heat(cmd: HeatCmd, cfg: RunConfig, out: &Option<PathBuf>) -> ExitCode {
    // t = 1 needs more ladder headroom than the relation checks do
    let n = cfg.numeric.truncation.max(40);
    let probe: Vec<usize> = (0..cfg.numeric.probe.max(20).min(n / 2)).collect();
    let mut report = Report::new(cfg.clone());
    let rel_err = |r: &heisen::TruncRep, t: f64, q: &QuadSpec| {
        let sm = heisen::heat_smeared(r, t, q);
        let dir = heisen::heat_direct(r, t);
        op_norm(&compress(&(sm - &dir), &probe)) / op_norm(&compress(&dir, &probe))
    };
    match cmd {
        HeatCmd::Direct { lambda, t } => {
            let r = heisen::build_irrep(lambda, c64(0.0, 0.0), n);
            let h = heisen::heat_direct(&r, t);
            let semi = op_norm(&compress(
                &(heisen::heat_direct(&r, t / 2.0) * heisen::heat_direct(&r, t / 2.0) - &h),
                &probe,
            ));
            report.push_residual("heat-semigroup", "heat-semigroup", semi, cfg.tolerances.exact);
            report.push_bool("heat-contraction", "heat-semigroup", op_norm(&h) <= 1.0 + 1e-12);
        }
        HeatCmd::Smeared { lambda, t } => {
            let r = heisen::build_irrep(lambda, c64(0.0, 0.0), n);
            report.push_residual(
                "heat-smeared",
                "heat-smearing",
                rel_err(&r, t, &cfg.quadrature),
                cfg.tolerances.truncation,
            );
        }
        HeatCmd::Compare { lambda } => {
            let r = heisen::build_irrep(lambda, c64(0.0, 0.0), n);
            for t in [0.25, 0.5, 1.0] {
                report.push_residual(
                    &format!("heat-smeared-t{t}"),
                    "heat-smearing",
                    rel_err(&r, t, &cfg.quadrature),
                    cfg.tolerances.truncation,
                );
            }
            // refinement must not hurt
            let coarse = QuadSpec {
                radius: cfg.quadrature.radius,
                n_radial: cfg.quadrature.n_radial / 2,
                n_angular: cfg.quadrature.n_angular / 2,
            };
            let e_coarse = rel_err(&r, 0.5, &coarse);
            let e_fine = rel_err(&r, 0.5, &cfg.quadrature);
            report.push_bool("heat-refinement", "heat-smearing", e_fine <= e_coarse * 1.05);
        }
    }
    emit(&report, out)
}

fn run_kernel(cmd: KernelCmd, cfg: RunConfig, out: &Option<PathBuf>) -> ExitCode {
    let s = cfg.numeric.s;
    let mut report = Report::new(cfg.clone());
    println!("kernel,params,value_re,value_im,error_estimate,method");
    match cmd {
        KernelCmd::Psi => {
            let pts = [(c64(1.0, 0.0), c64(0.0, 1.0)), (c64(0.5, 0.5), c64(-0.3, 0.8))];
            for (z, zp) in pts {
                let v = kernels::psi(z, zp, s);
                println!("psi,\"z={z} z'={zp}\",{},{},0,closed-form", v.re, v.im);
                report.push_residual("psi-unimodular", "skew-bicharacter", (v.norm() - 1.0).abs(), 1e-12);
            }
        }
        KernelCmd::Htilde => {
            let q = QuadSpec { radius: 150.0, n_radial: 600, n_angular: 48 };
            for w in [0.0, 0.5, 1.0, 2.0] {
                let v = kernels::h_tilde(c64(w, 0.0), s, &q);
                println!("htilde,\"|w|={w}\",{},{},{},quadrature", v.re, v.im, v.error_estimate);
            }
            let v0 = kernels::h_tilde(c64(0.0, 0.0), s, &q);
            let expect = std::f64::consts::PI * s * s;
            report.push_residual(
                "htilde-at-zero",
                "polynomial-weight-transform",
                (v0.re - expect).abs() / expect,
                5e-4,
            );
        }
        KernelCmd::L => {
            let q = QuadSpec { radius: 60.0, n_radial: 180, n_angular: 24 };
            let dq = QuadSpec { radius: 50.0, n_radial: 140, n_angular: 20 };
            let (w1, w2) = (c64(0.5, 0.2), c64(-0.3, 0.4));
            let nested = kernels::l_kernel(w1, w2, s, &q);
            let direct = kernels::l_kernel_direct(w1, w2, s, &dq);
            println!("l,\"w1={w1} w2={w2} nested\",{},{},{},quadrature", nested.re, nested.im, nested.error_estimate);
            println!("l,\"w1={w1} w2={w2} direct\",{},{},0,quadrature", direct.re, direct.im);
            let rel = (nested.value() - direct).norm() / direct.norm().max(1e-12);
            report.push_residual("l-nested-vs-direct", "nested-transform", rel, 1e-4);
        }
        KernelCmd::Fgen => {
            let q = QuadSpec { radius: 8.0, n_radial: 96, n_angular: 96 };
            let pts = [
                (c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)),
                (c64(0.5, 0.2), c64(1.0, 0.0), c64(-0.3, 0.4)),
                (c64(1.0, 0.0), c64(0.7, 0.7), c64(0.2, -0.1)),
                (c64(-0.4, 0.6), c64(1.5, 0.0), c64(0.5, 0.5)),
                (c64(0.3, 0.3), c64(0.4, -0.3), c64(1.0, 0.2)),
            ];
            for (a, g, d) in pts {
                let closed = kernels::f_gen(a, g, d, s);
                let sm = kernels::f_gen_smeared(a, g, d, s, &q);
                println!("fgen,\"a={a} g={g} d={d}\",{closed},0,{},closed-form", sm.error_estimate);
                report.push_residual(
                    &format!("fgen@{a}"),
                    "cosh-tanh-closed-form",
                    (sm.re - closed).abs() / closed,
                    1e-4,
                );
            }
        }
        KernelCmd::Gw { trials, seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rand_grat = |rng: &mut rand_chacha::ChaCha8Rng| loop {
                let g = GRat::new(
                    BigRational::new(rng.gen_range(-9i64..10).into(), rng.gen_range(1i64..7).into()),
                    BigRational::new(rng.gen_range(-9i64..10).into(), rng.gen_range(1i64..7).into()),
                );
                if !g.is_zero() {
                    return g;
                }
            };
            let mut ok = 0usize;
            for _ in 0..trials {
                let (u, v, w) = (rand_grat(&mut rng), rand_grat(&mut rng), rand_grat(&mut rng));
                if kernels::verify_gw_factorization(&u, &v, &w) {
                    ok += 1;
                }
            }
            println!("gw,\"trials={trials} seed={seed}\",{ok},0,0,exact");
            report.push_bool("gw-factorization", "shear-factorization", ok == trials);
        }
    }
    emit(&report, out)
}

fn run_zcalc(cmd: ZcalcCmd, cfg: RunConfig, out: &Option<PathBuf>) -> ExitCode {
    let mut report = Report::new(cfg.clone());
    let random_mat = |seed: u64, n: usize, scale: f64| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        CMat::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
    };
    match cmd {
        ZcalcCmd::Roundtrip => {
            for seed in 0..5u64 {
                let t = random_mat(seed, 8, 4.0);
                let back = zcalc::inverse_z(&zcalc::z_transform(&t));
                report.push_residual(
                    &format!("roundtrip-{seed}"),
                    "z-transform",
                    (back - &t).norm() / (1.0 + t.norm()),
                    1e-10,
                );
            }
        }
        ZcalcCmd::Commute => {
            let d1 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c64(1.0, 0.5),
                c64(-2.0, 0.0),
                c64(0.0, 3.0),
            ]));
            let p = &d1 * &d1 + &d1 * c64(0.7, 0.0);
            report.push_bool("commute-positive", "strong-commutation", zcalc::strongly_commute(&d1, &p, 1e-10));
            let l = heisen::ladder(2, false);
            report.push_bool(
                "commute-negative",
                "strong-commutation",
                !zcalc::strongly_commute(&l, &l.adjoint(), 1e-6),
            );
        }
        ZcalcCmd::Product => {
            let t1 = CMat::from_element(1, 1, c64(2.0, 0.0));
            let t2 = CMat::from_element(1, 1, c64(3.0, 0.0));
            let (p, rep) = zcalc::affiliated_product(&t1, &t2, 1e-12);
            report.push_residual("product-scalar", "affiliated-product", (p[(0, 0)].re - 6.0).abs(), 1e-12);
            report.push_bool("product-q-consistency", "affiliated-product", rep.pass);
        }
        ZcalcCmd::Density => {
            let grid = zcalc::density_grid_check(200, 1e-3);
            report.push_bool("density-zero-set", "density-functions", grid.zero_set_confirmed);
            report.push_bool("density-implication", "density-functions", grid.implication_holds);
            report.push_residual("f-corner", "density-functions", zcalc::f_density(1.0, 0.0).abs(), 0.0);
            report.push_residual(
                "f-midpoint",
                "density-functions",
                (zcalc::f_density(0.5, 0.5) - 0.625).abs(),
                1e-15,
            );
        }
    }
    emit(&report, out)
}

fn run_calibrate(cfg: RunConfig, out: &Option<PathBuf>) -> ExitCode {
    let rep = slpoly::calibrate(cfg.numeric.s, cfg.tolerances.fd);
    let mut report = Report::new(cfg.clone());
    for e in &rep.entries {
        let id = format!(
            "orient={} sig_l={} sig_r={} swap={}",
            e.conventions.left_inverse_orientation,
            e.conventions.sig_l_star,
            e.conventions.sig_r_star,
            e.conventions.lr_swap
        );
        // informational rows: each setting either passes all arbiters or not
        report.push_bool(&format!("setting[{id}]"), "conventions", e.pass == (Some(e.conventions) == rep.unique_pass));
    }
    report.push_bool(
        "unique-calibration",
        "conventions",
        rep.unique_pass == Some(cfg.conventions.field_conventions()),
    );
    emit(&report, out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    match cli.cmd {
        Cmd::Hopf { cmd: HopfCmd::Verify } => run_hopf(cfg, &cli.out),
        Cmd::Nf { expr } => match hlqg::parse::parse(&expr) {
            Ok(hlqg::parse::Value::Poly(p)) => {
                println!("{p}");
                ExitCode::SUCCESS
            }
            Ok(_) => {
                eprintln!("error: nf expects a rank-1 expression");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Cmd::Rep { cmd } => run_rep(cmd, cfg, &cli.out),
        Cmd::Heat { cmd } => run_heat(cmd, cfg, &cli.out),
        Cmd::Kernel { cmd } => run_kernel(cmd, cfg, &cli.out),
        Cmd::Zcalc { cmd } => run_zcalc(cmd, cfg, &cli.out),
        Cmd::Calibrate { cmd: CalibrateCmd::Conventions } => run_calibrate(cfg, &cli.out),
    }
}
