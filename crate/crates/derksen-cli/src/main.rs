//! Command-line front end for the engine.
//!
//! Exit codes:
//!   0: success; for `verify`, every check passed
//!   1: `verify` completed but some check failed
//!   2: expression or usage error
//!   3: internal invariant violation
//!   4: `obstruct` found the target representable (no obstruction)

use clap::{Parser, Subcommand, ValueEnum};
use derksen::cusp::{self, CuspInstance, NegativeControl, VerificationConfig};
use derksen::derivation::Derivation;
use derksen::expr::{eval, parse_expr};
use derksen::kernel::{
    default_obstruction_target, kernel_basis, kernel_membership_via_coordinates,
    obstruction_certificate_for_target, KernelMonomial,
};
use derksen::poly::Var;
use derksen::rings::{ExtElem, ExtRingSpec};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const EXIT_REPRESENTABLE: u8 = 4;

/// Expressions whose evaluated degree could exceed this are refused up
/// front; past the limit the exact arithmetic would grind for no purpose.
const MAX_EXPR_DEGREE: u64 = 100_000;

fn parse_element(text: &str, spec: &ExtRingSpec) -> Result<ExtElem, String> {
    let ast = parse_expr(text).map_err(|e| e.to_string())?;
    let bound = ast.degree_bound();
    if bound > MAX_EXPR_DEGREE {
        return Err(format!(
            "expression degree bound {bound} exceeds the limit of {MAX_EXPR_DEGREE}"
        ));
    }
    Ok(eval(&ast, spec))
}

#[derive(Parser)]
#[command(
    name = "derksen",
    version,
    about = "Exact computations with a locally nilpotent derivation over the cusp",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification scenario and print a summary
    Verify {
        /// Seed for the property-sampling checks
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Truncation exponent used by the obstruction certificates
        #[arg(long, default_value_t = 4)]
        modulus: u32,
        /// Write the full JSON report to this path
        #[arg(long)]
        report: Option<PathBuf>,
        /// Verify a deliberately broken instance instead (expected to fail):
        /// gap-image, relation-perturbed or kernel-perturbed
        #[arg(long)]
        negative_control: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Apply the derivation to an expression
    Apply {
        #[arg(long)]
        expr: String,
        /// How many times to apply the derivation
        #[arg(long, default_value_t = 1)]
        times: usize,
        /// Replace the built-in derivation by images for T, X, Y, z
        #[arg(long, num_args = 4, value_names = ["T_IMG", "X_IMG", "Y_IMG", "Z_IMG"])]
        derivation: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Apply the exponential automorphism of the derivation
    Exp {
        #[arg(long)]
        expr: String,
        /// Iteration budget for the exponential sum
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
        #[arg(long, num_args = 4, value_names = ["T_IMG", "X_IMG", "Y_IMG", "Z_IMG"])]
        derivation: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Report subring and kernel membership of an expression
    Member {
        #[arg(long)]
        expr: String,
        #[arg(long, num_args = 4, value_names = ["T_IMG", "X_IMG", "Y_IMG", "Z_IMG"])]
        derivation: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// List the kernel monomials T^m*P^k*z^e within bounds
    KernelBasis {
        /// Bound on the P-exponent
        #[arg(long)]
        xy_degree: u32,
        /// Bound on the T-exponent
        #[arg(long)]
        t_degree: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Build the obstruction certificate for T^2*P^(d+1)
    Obstruct {
        /// Degree bound for the kernel generators
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 4)]
        modulus: u32,
        /// Override the target (must be a single monomial T^a*P^b or T^a*P^b*z)
        #[arg(long)]
        target: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(_) => {
            eprintln!("internal invariant violation; this is a bug");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

/// Parses the four `--derivation` image expressions, checked for
/// well-definedness on the quotient.
fn custom_derivation(inst: &CuspInstance, images: &[String]) -> Result<Derivation, String> {
    let parse = |text: &str| {
        parse_element(text, &inst.spec).map_err(|e| format!("in derivation image `{text}`: {e}"))
    };
    let t_img = parse(&images[0])?;
    let x_img = parse(&images[1])?;
    let y_img = parse(&images[2])?;
    let z_img = parse(&images[3])?;
    let d = Derivation::new(
        &inst.spec,
        [(Var::T, t_img), (Var::X, x_img), (Var::Y, y_img)],
        z_img,
    )
    .map_err(|e| e.to_string())?;
    if !d.is_well_defined(&inst.spec) {
        return Err(
            "the requested derivation is not well defined on the quotient: \
             2*z*D(z) differs from D(q)"
                .to_string(),
        );
    }
    Ok(d)
}

fn resolve_derivation(
    inst: &CuspInstance,
    custom: &Option<Vec<String>>,
) -> Result<Derivation, String> {
    match custom {
        Some(images) => custom_derivation(inst, images),
        None => Ok(inst.deriv.clone()),
    }
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Verify {
            seed,
            modulus,
            report,
            negative_control,
            format,
        } => cmd_verify(seed, modulus, report, negative_control, format),
        Command::Apply {
            expr,
            times,
            derivation,
            format,
        } => cmd_apply(&expr, times, &derivation, format),
        Command::Exp {
            expr,
            max_iter,
            derivation,
            format,
        } => cmd_exp(&expr, max_iter, &derivation, format),
        Command::Member {
            expr,
            derivation,
            format,
        } => cmd_member(&expr, &derivation, format),
        Command::KernelBasis {
            xy_degree,
            t_degree,
            format,
        } => cmd_kernel_basis(xy_degree, t_degree, format),
        Command::Obstruct {
            d,
            modulus,
            target,
            format,
        } => cmd_obstruct(d, modulus, &target, format),
    }
}

fn usage_error(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn cmd_verify(
    seed: u64,
    modulus: u32,
    report_path: Option<PathBuf>,
    negative_control: Option<String>,
    format: Format,
) -> u8 {
    if modulus == 0 {
        return usage_error("--modulus must be at least 1");
    }
    let inst = match negative_control {
        None => CuspInstance::build(),
        Some(name) => match name.parse::<NegativeControl>() {
            Ok(control) => CuspInstance::negative_control(control),
            Err(e) => return usage_error(e),
        },
    };
    let cfg = VerificationConfig {
        seed,
        modulus,
        ..VerificationConfig::default()
    };
    let report = cusp::run_full_verification(&inst, &cfg);
    if let Some(path) = &report_path {
        if let Err(e) = std::fs::write(path, report.to_json_string()) {
            return usage_error(format!("cannot write report to {}: {e}", path.display()));
        }
    }
    match format {
        Format::Json => println!("{}", report.to_json_string()),
        Format::Text => {
            for check in &report.checks {
                let status = if check.passed() { "pass" } else { "FAIL" };
                println!(
                    "{status}  {id:<32}  {title}",
                    id = check.id,
                    title = check.title
                );
            }
            println!(
                "{} of {} checks passed; status: {}",
                report.summary.passed,
                report.summary.total,
                if report.passed() { "pass" } else { "fail" }
            );
        }
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

fn cmd_apply(expr: &str, times: usize, derivation: &Option<Vec<String>>, format: Format) -> u8 {
    let inst = CuspInstance::build();
    let d = match resolve_derivation(&inst, derivation) {
        Ok(d) => d,
        Err(e) => return usage_error(e),
    };
    let value = match parse_element(expr, &inst.spec) {
        Ok(v) => v,
        Err(e) => return usage_error(e),
    };
    let mut result = value;
    for _ in 0..times {
        result = d.apply(&result, &inst.spec);
    }
    match format {
        Format::Text => println!("{result}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "input": expr,
                "times": times,
                "result": result.to_string(),
            }))
            .expect("serializes")
        ),
    }
    EXIT_OK
}

fn cmd_exp(expr: &str, max_iter: usize, derivation: &Option<Vec<String>>, format: Format) -> u8 {
    if max_iter == 0 {
        return usage_error("--max-iter must be at least 1");
    }
    let inst = CuspInstance::build();
    let d = match resolve_derivation(&inst, derivation) {
        Ok(d) => d,
        Err(e) => return usage_error(e),
    };
    let value = match parse_element(expr, &inst.spec) {
        Ok(v) => v,
        Err(e) => return usage_error(e),
    };
    let result = match d.exp(&value, &inst.spec, max_iter) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    match format {
        Format::Text => println!("{result}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "input": expr,
                "result": result.to_string(),
            }))
            .expect("serializes")
        ),
    }
    EXIT_OK
}

fn cmd_member(expr: &str, derivation: &Option<Vec<String>>, format: Format) -> u8 {
    let inst = CuspInstance::build();
    let d = match resolve_derivation(&inst, derivation) {
        Ok(d) => d,
        Err(e) => return usage_error(e),
    };
    let value: ExtElem = match parse_element(expr, &inst.spec) {
        Ok(v) => v,
        Err(e) => return usage_error(e),
    };
    let in_s = inst.sub.contains(&value);
    let in_kernel = d.in_kernel(&value, &inst.spec);
    let in_kernel_coords = kernel_membership_via_coordinates(&value);
    match format {
        Format::Text => {
            println!("in_S: {in_s}");
            println!("in_kernel: {in_kernel}");
            println!("in_kernel_coords: {in_kernel_coords}");
        }
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "expr": expr,
                "in_S": in_s,
                "in_kernel": in_kernel,
                "in_kernel_coords": in_kernel_coords,
            }))
            .expect("serializes")
        ),
    }
    EXIT_OK
}

fn cmd_kernel_basis(xy_degree: u32, t_degree: u32, format: Format) -> u8 {
    let inst = CuspInstance::build();
    let basis = kernel_basis(&inst.sub, &inst.deriv, &inst.spec, xy_degree, t_degree);
    match format {
        Format::Text => {
            for m in &basis.monomials {
                println!("{m}");
            }
        }
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "xy_degree": basis.xy_degree,
                "t_degree": basis.t_degree,
                "monomials": basis
                    .monomials
                    .iter()
                    .map(|m| json!({
                        "t_exp": m.t_exp,
                        "p_exp": m.p_exp,
                        "z_exp": m.z_exp,
                        "display": m.to_string(),
                    }))
                    .collect::<Vec<_>>(),
            }))
            .expect("serializes")
        ),
    }
    EXIT_OK
}

fn cmd_obstruct(d: u32, modulus: u32, target: &Option<String>, format: Format) -> u8 {
    if d == 0 {
        return usage_error("--d must be at least 1");
    }
    if modulus == 0 {
        return usage_error("--modulus must be at least 1");
    }
    let inst = CuspInstance::build();
    let target_monomial = match target {
        None => default_obstruction_target(d),
        Some(text) => {
            let value = match parse_element(text, &inst.spec) {
                Ok(v) => v,
                Err(e) => return usage_error(e),
            };
            match KernelMonomial::from_element(&value) {
                Some(m) => m,
                None => {
                    return usage_error(
                        "--target must be a single monomial of the form T^a*P^b or T^a*P^b*z",
                    )
                }
            }
        }
    };
    let cert = obstruction_certificate_for_target(
        &inst.sub,
        &inst.deriv,
        &inst.spec,
        d,
        modulus,
        target_monomial,
    );
    if !cert.validate() {
        eprintln!("error: certificate failed independent revalidation; this is a bug");
        return EXIT_INTERNAL;
    }
    match format {
        Format::Text => {
            println!("obstruction certificate: d={d} modulus={modulus}");
            println!("target: {}", cert.target);
            println!(
                "generators ({}): {}",
                cert.generators.len(),
                cert.generators
                    .iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            println!(
                "system: {} constraint rows, {} coefficient columns",
                cert.matrix.rows(),
                cert.matrix.cols()
            );
            println!(
                "verdict: {}",
                if cert.is_infeasible() {
                    "infeasible (obstruction certified)"
                } else {
                    "feasible (target is representable)"
                }
            );
        }
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&cert).expect("serializes")
        ),
    }
    if cert.is_infeasible() {
        EXIT_OK
    } else {
        EXIT_REPRESENTABLE
    }
}
