//! Command-line frontend: every library operation behind one binary.
//!
//! Results go to stdout as JSON (CSV for tabular data); human-oriented
//! summaries go to stderr.  Exit codes: 0 success, 2 input/validation
//! error, 3 numerical failure.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use numrad::classify3::{classify, DiskClass3};
use numrad::constructors;
use numrad::diskgeom;
use numrad::io::{matrix_from_json, matrix_to_json};
use numrad::optimize;
use numrad::radius;
use numrad::ComplexMatrix;
use numrad::Error as NumradError;

#[derive(Parser)]
#[command(name = "numrad", version, about = "Numerical radius and disk-matrix toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MatrixArg {
    /// Path to a matrix JSON file, or `-` for stdin.
    matrix: String,
}

#[derive(Subcommand)]
enum Command {
    /// Numerical radius r(X).
    Radius {
        #[command(flatten)]
        input: MatrixArg,
        /// Angle-grid size for the circle scan.
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Minimum of the support function over the circle (inner numerical
    /// radius when the origin lies in the field of values).
    Inner {
        #[command(flatten)]
        input: MatrixArg,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Disk distortion r(X) - min support.
    Distortion {
        #[command(flatten)]
        input: MatrixArg,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Field-of-values boundary samples as CSV (theta,re,im,lambda,gap).
    Fov {
        #[command(flatten)]
        input: MatrixArg,
        /// Number of boundary samples.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Equal-eigenvalue disk-matrix test.
    DiskCheck {
        #[command(flatten)]
        input: MatrixArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sampled subdifferential dimension at a disk matrix.
    Subdiff {
        #[command(flatten)]
        input: MatrixArg,
        /// Number of sampled angles (default 4n + 3).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Also emit the generator matrices.
        #[arg(long)]
        emit_generators: bool,
    },
    /// Partial-smoothness certificate for a candidate eigenvector matrix G.
    Certify {
        #[command(flatten)]
        input: MatrixArg,
        /// Matrix JSON file with G (defaults to the identity).
        #[arg(long)]
        g: Option<String>,
        /// Number of sampled angles (default 4n + 3).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Exact 3x3 classification.
    Classify3 {
        #[command(flatten)]
        input: MatrixArg,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Generate a named matrix family as matrix JSON.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Proximal operator of the numerical radius.
    Prox {
        #[command(flatten)]
        input: MatrixArg,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
        /// Write the prox point as matrix JSON here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Static-output-feedback Monte-Carlo experiment.
    Sofb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        threshold: f64,
        /// Write per-trial rows (trial,r_opt,distortion,disk) here.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Run the packaged smoke checks.
    Selftest,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Crabb matrix (superdiagonal sqrt(2), 1, ..., 1, sqrt(2)).
    Crabb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// 2x2 Jordan block scaled to the unit disk.
    Jordan2 {
        #[arg(long)]
        out: Option<String>,
    },
    /// 3x3 Jordan block scaled to the unit disk.
    Jordan3 {
        #[arg(long)]
        out: Option<String>,
    },
    /// The rank-one disk matrix E0.
    E0 {
        #[arg(long)]
        out: Option<String>,
    },
    /// Interior subgradient H of r at the Crabb matrix.
    H {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Y(xi) family.
    Y {
        #[arg(long, default_value_t = 0.0)]
        xi_re: f64,
        #[arg(long, default_value_t = 0.0)]
        xi_im: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Z(phi, psi) family.
    Z {
        #[arg(long)]
        phi: f64,
        #[arg(long, default_value_t = 0.0)]
        psi: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// General superdiagonal matrix from JSON entries [[re,im],...].
    Superdiag {
        #[arg(long)]
        entries: String,
        #[arg(long)]
        out: Option<String>,
    },
}

fn read_matrix(path: &str) -> Result<ComplexMatrix, NumradError> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| NumradError::InvalidInput(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| NumradError::InvalidInput(format!("reading {path}: {e}")))?
    };
    matrix_from_json(&text)
}

fn emit(path: &Option<String>, text: &str) -> Result<(), NumradError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| NumradError::InvalidInput(format!("writing {p}: {e}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn run(cli: Cli) -> Result<(), NumradError> {
    match cli.command {
        Command::Radius { input, grid } => {
            let x = read_matrix(&input.matrix)?;
            let r = radius::numerical_radius(&x, grid);
            println!("{}", json!({"r": r.value, "argmax_theta": r.argmax_theta}));
            eprintln!("r = {:.12}", r.value);
        }
        Command::Inner { input, grid } => {
            let x = read_matrix(&input.matrix)?;
            let r = radius::inner_support(&x, grid);
            println!(
                "{}",
                json!({
                    "inner": r.value,
                    "argmin_theta": r.argmax_theta,
                    "origin_outside": r.origin_outside,
                })
            );
        }
        Command::Distortion { input, grid } => {
            let x = read_matrix(&input.matrix)?;
            let outer = radius::numerical_radius(&x, grid);
            let inner = radius::inner_support(&x, grid);
            println!(
                "{}",
                json!({
                    "distortion": outer.value - inner.value,
                    "r": outer.value,
                    "inner": inner.value,
                })
            );
        }
        Command::Fov { input, samples, out } => {
            let x = read_matrix(&input.matrix)?;
            let points = radius::fov_boundary(&x, samples)?;
            emit(&out, &radius::fov_boundary_csv(&points))?;
        }
        Command::DiskCheck { input, tol } => {
            let x = read_matrix(&input.matrix)?;
            let check = diskgeom::is_disk_near(&x, tol);
            println!(
                "{}",
                serde_json::to_string(&check).expect("disk check serialization")
            );
        }
        Command::Subdiff {
            input,
            samples,
            tol,
            emit_generators,
        } => {
            let x = read_matrix(&input.matrix)?;
            let m = samples.unwrap_or(4 * x.n() + 3);
            let dim = diskgeom::subdiff_dimension(&x, m, tol)?;
            let mut payload = json!({"dimension": dim, "samples": m});
            if emit_generators {
                let gens = diskgeom::subdiff_sample(&x, m)?;
                payload["generators"] = serde_json::Value::Array(
                    gens.iter()
                        .map(|g| {
                            serde_json::from_str::<serde_json::Value>(&matrix_to_json(&g.matrix))
                                .expect("matrix json")
                        })
                        .collect(),
                );
            }
            println!("{payload}");
        }
        Command::Certify {
            input,
            g,
            samples,
            tol,
        } => {
            let x = read_matrix(&input.matrix)?;
            let g = match g {
                Some(path) => read_matrix(&path)?,
                None => ComplexMatrix::identity(x.n()),
            };
            let m = samples.unwrap_or(4 * x.n() + 3);
            let cert = diskgeom::certify_partial_smoothness(&x, &g, m, tol)?;
            println!(
                "{}",
                serde_json::to_string(&cert).expect("certificate serialization")
            );
            eprintln!(
                "certificate {}",
                if cert.valid { "valid" } else { "invalid" }
            );
        }
        Command::Classify3 { input, tol } => {
            let x = read_matrix(&input.matrix)?;
            let cls = classify(&x, tol)?;
            let form = cls.form.as_ref();
            println!(
                "{}",
                json!({
                    "label": format!("{:?}", cls.label),
                    "is_disk": cls.is_disk,
                    "a": form.map(|f| [f.a.re, f.a.im]),
                    "b": form.map(|f| [f.b.re, f.b.im]),
                    "c": form.map(|f| [f.c.re, f.c.im]),
                    "d": form.map(|f| [f.d.re, f.d.im]),
                    "margins": {
                        "abs_a": finite_or_null(cls.abs_a),
                        "abs_d": finite_or_null(cls.abs_d),
                        "two_c_minus_b": finite_or_null(cls.two_c_minus_b),
                        "abcd_residual": finite_or_null(cls.abcd_residual),
                    },
                    "radius": cls.radius,
                })
            );
        }
        Command::Gen { family } => {
            let (matrix, out) = match family {
                GenFamily::Crabb { n, out } => (constructors::crabb(n)?, out),
                GenFamily::Jordan2 { out } => (constructors::jordan2(), out),
                GenFamily::Jordan3 { out } => (constructors::jordan3(), out),
                GenFamily::E0 { out } => (constructors::e0(), out),
                GenFamily::H { n, out } => (constructors::h_subgradient(n)?, out),
                GenFamily::Y { xi_re, xi_im, out } => {
                    (constructors::y_family(Complex64::new(xi_re, xi_im))?, out)
                }
                GenFamily::Z { phi, psi, out } => (constructors::z_family(phi, psi)?, out),
                GenFamily::Superdiag { entries, out } => {
                    let pairs: Vec<[f64; 2]> = serde_json::from_str(&entries).map_err(|e| {
                        NumradError::InvalidInput(format!("--entries must be [[re,im],...]: {e}"))
                    })?;
                    let entries: Vec<Complex64> =
                        pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                    let spec = constructors::SuperdiagSpec::new(entries)?;
                    (spec.matrix(), out)
                }
            };
            emit(&out, &matrix_to_json(&matrix))?;
        }
        Command::Prox {
            input,
            tol,
            max_iter,
            out,
        } => {
            let u = read_matrix(&input.matrix)?;
            let res = optimize::prox_numerical_radius(&u, tol, max_iter);
            if let Some(path) = &out {
                std::fs::write(path, matrix_to_json(&res.x))
                    .map_err(|e| NumradError::InvalidInput(format!("writing {path}: {e}")))?;
            }
            println!(
                "{}",
                json!({
                    "radius": res.radius,
                    "objective": res.objective,
                    "iterations": res.iterations,
                    "model_gap": res.model_gap,
                    "stationarity_residual": res.stationarity_residual,
                    "converged": res.converged,
                    "x": if out.is_none() {
                        serde_json::from_str::<serde_json::Value>(&matrix_to_json(&res.x)).unwrap()
                    } else {
                        serde_json::Value::Null
                    },
                })
            );
            if !res.converged {
                return Err(NumradError::NoConvergence(format!(
                    "prox model gap {:.3e} after {} iterations",
                    res.model_gap, res.iterations
                )));
            }
        }
        Command::Sofb {
            n,
            m,
            p,
            trials,
            seed,
            threshold,
            csv,
        } => {
            let summary = optimize::sofb_experiment(n, m, p, trials, seed, threshold)?;
            if let Some(path) = &csv {
                std::fs::write(path, optimize::experiment_csv(&summary))
                    .map_err(|e| NumradError::InvalidInput(format!("writing {path}: {e}")))?;
            }
            println!(
                "{}",
                json!({
                    "n": n, "m": m, "p": p,
                    "trials": trials,
                    "seed": seed,
                    "threshold": threshold,
                    "disk_percentage": summary.disk_percentage,
                })
            );
            eprintln!(
                "{} of {} trials produced disks ({}%)",
                summary.records.iter().filter(|r| r.disk).count(),
                trials,
                summary.disk_percentage
            );
        }
        Command::Selftest => selftest()?,
    }
    Ok(())
}

fn selftest() -> Result<(), NumradError> {
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{} {}", if ok { "ok  " } else { "FAIL" }, name);
        if !ok {
            failures += 1;
        }
    };

    let k5 = constructors::crabb(5)?;
    check(
        "crabb(5) radius 1",
        (radius::numerical_radius(&k5, 256).value - 1.0).abs() < 1e-9,
    );
    check(
        "crabb(5) distortion 0",
        radius::disk_distortion(&k5, 256).abs() < 1e-9,
    );
    check(
        "crabb(5) crouzeix ratio 1/2",
        (constructors::crouzeix_ratio(&k5)? - 0.5).abs() < 1e-8,
    );
    check(
        "jordan3 classifies NeNe",
        classify(&constructors::jordan3(), 1e-6)?.label == DiskClass3::NeNe,
    );
    check(
        "2 E0 classifies EqLt",
        classify(&constructors::e0().scale_re(2.0), 1e-6)?.label == DiskClass3::EqLt,
    );
    let cert = diskgeom::certify_partial_smoothness(
        &constructors::jordan2(),
        &ComplexMatrix::identity(2),
        11,
        1e-8,
    )?;
    check("jordan2 certificate valid, codim 4", cert.valid && cert.codimension == Some(4));
    check(
        "jordan2 subdifferential dimension 4",
        diskgeom::subdiff_dimension(&constructors::jordan2(), 11, 1e-8)? == 4,
    );
    let prox = optimize::prox_numerical_radius(&constructors::e0().scale_re(1.5), 1e-9, 2000);
    check(
        "prox(1.5 E0) = E0",
        prox.x.sub(&constructors::e0()).fro_norm() < 1e-6,
    );
    let spec = constructors::SuperdiagSpec::new(vec![
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
    ])?;
    let norm = constructors::superdiag_normalize(&spec);
    let rebuilt = constructors::superdiag_from_sc(&norm.s, &norm.c)?.scale_re(norm.scale);
    check(
        "superdiag normalization round trip",
        rebuilt.sub(&spec.matrix()).fro_norm() < 1e-10,
    );
    let json = matrix_to_json(&k5);
    check(
        "matrix json round trip",
        matrix_from_json(&json)? == k5,
    );

    if failures > 0 {
        Err(NumradError::NoConvergence(format!(
            "{failures} selftest checks failed"
        )))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                NumradError::InvalidInput(_) | NumradError::Singular(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
