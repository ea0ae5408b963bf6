use serde_json::{json, Value};
use tsum::densities::{GaussStudentSeries, StudentPairSeries, TruncationPolicy};
use tsum::mixing::{alpha_prefix, alpha_sequence, c_prefix, c_sequence, GaussStudentParams, StudentPairParams, HARD_CAP};
use tsum::oracle::{
    convolve_quadrature_1d, fourier_product_check, mc_density_check, moments_check, monotonicity_check, Family,
    FourierSettings, ValidationReport,
};
use tsum::sampling::{sample_k, sample_n};
use tsum::ConvolutionSpec;

use crate::table::{Cell, Table};
use crate::{
    parse_grid, Check, CliError, CoeffsArgs, Command, DensityArgs, DensityLaw, FamilyArg, Format, McLaw,
    ParamArgs, SampleArgs, SampleLaw, ValidateArgs,
};

/// Result of a command before rendering.
#[derive(Debug, Clone)]
pub enum Output {
    Table { command: &'static str, table: Table },
    Report { params: Value, report: ValidationReport },
}

impl Output {
    pub fn passed(&self) -> bool {
        match self {
            Output::Table { .. } => true,
            Output::Report { report, .. } => report.passed,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Table { table, .. }, Format::Csv) => table.to_csv(),
            (Output::Table { command, table }, Format::Json) => pretty(&table.to_json(command)),
            (Output::Report { params, report }, Format::Json) => pretty(&json!({
                "schema": 1,
                "command": "validate",
                "params": params,
                "report": report,
            })),
            (Output::Report { params, report }, Format::Csv) => report_table(params, report).to_csv(),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn report_table(params: &Value, r: &ValidationReport) -> Table {
    let mut t = Table::new(&["grid", "series", "oracle", "abs_err"]);
    if let Value::Object(m) = params {
        for (k, v) in m {
            t.meta(k, v.as_str().map_or_else(|| v.to_string(), str::to_string));
        }
    }
    for ((g, s), o) in r.grid.iter().zip(&r.series_values).zip(&r.oracle_values) {
        t.rows.push(vec![Cell::Real(*g), Cell::Real(*s), Cell::Real(*o), Cell::Real((s - o).abs())]);
    }
    t.trailer("method", serde_json::to_value(r.method).expect("enum").as_str().unwrap_or_default());
    t.trailer("max_abs_err", format!("{:.16e}", r.max_abs_err));
    t.trailer("max_rel_err", format!("{:.16e}", r.max_rel_err));
    if let Some(c) = &r.chi_square {
        t.trailer("chi_square", format!("{:.16e}", c.statistic));
        t.trailer("dof", c.dof);
        t.trailer("p_value", format!("{:.16e}", c.p_value));
    }
    t.trailer("passed", r.passed);
    for (i, n) in r.notes.iter().enumerate() {
        t.trailer(&format!("note{i}"), n);
    }
    t
}

pub fn execute(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Coeffs(a) => coeffs(a),
        Command::Density(a) => density(a),
        Command::Sample(a) => sample(a),
        Command::Validate(a) => validate(a),
        Command::Figure1(a) => {
            let nu = match (a.nu, a.df) {
                (Some(nu), _) => nu,
                (None, Some(df)) => df / 2.0,
                (None, None) => 2.0,
            };
            let table = figure1(nu, a.sigma, &parse_grid(&a.grid)?, a.eps)?;
            Ok(Output::Table { command: "figure1", table })
        }
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("{flag} is required"))
}

pub fn nu(p: &ParamArgs) -> Result<f64, CliError> {
    p.nu.or(p.df.map(|df| df / 2.0)).ok_or_else(|| missing("--nu or --df"))
}

pub fn mu(p: &ParamArgs) -> Result<f64, CliError> {
    p.mu.or(p.df2.map(|df| df / 2.0)).ok_or_else(|| missing("--mu or --df2"))
}

/// Parameters of `a₁X + a₂T`, already scaled.
fn gauss_params(p: &ParamArgs) -> Result<GaussStudentParams, CliError> {
    let nu = nu(p)?;
    let base = match (p.sigma, p.gamma) {
        (Some(s), _) => GaussStudentParams::new(p.d, nu, s)?,
        (None, Some(g)) => GaussStudentParams::with_gamma(p.d, nu, g)?,
        (None, None) => return Err(missing("--sigma or --gamma")),
    };
    if (p.a1, p.a2) == (1.0, 1.0) {
        Ok(base)
    } else {
        Ok(base.scaled(p.a1, p.a2)?)
    }
}

fn pair_params(p: &ParamArgs) -> Result<StudentPairParams, CliError> {
    Ok(StudentPairParams::new(p.d, nu(p)?, mu(p)?)?)
}

fn policy(eps: f64, terms: Option<usize>) -> Result<TruncationPolicy, CliError> {
    Ok(TruncationPolicy::new(eps, terms.unwrap_or(HARD_CAP))?)
}

fn coeffs(a: &CoeffsArgs) -> Result<Output, CliError> {
    let (family, seq) = match a.family {
        FamilyArg::Alpha => {
            let p = gauss_params(&a.params)?;
            let seq = match a.terms {
                Some(n) => alpha_prefix(&p, n)?,
                None => alpha_sequence(&p, a.eps)?,
            };
            ("alpha", seq)
        }
        FamilyArg::C => {
            let p = pair_params(&a.params)?;
            let seq = match a.terms {
                Some(n) => c_prefix(&p, n)?,
                None => c_sequence(&p, a.eps)?,
            };
            ("c", seq)
        }
    };
    let mut t = Table::new(&["index", "value", "cumulative_mass"]);
    t.meta("command", "coeffs");
    t.meta("family", family);
    t.meta("params", &seq.params_digest);
    match a.terms {
        Some(n) => t.meta("terms", n),
        None => t.meta("eps", format!("{:e}", a.eps)),
    }
    for (k, (v, c)) in seq.values.iter().zip(seq.cumulative()).enumerate() {
        t.rows.push(vec![Cell::Int(k as u64), Cell::Real(*v), Cell::Real(c)]);
    }
    t.trailer("tail_bound", format!("{:.16e}", seq.tail_bound));
    Ok(Output::Table { command: "coeffs", table: t })
}

fn density(a: &DensityArgs) -> Result<Output, CliError> {
    let grid = parse_grid(&a.grid)?;
    let tp = policy(a.eps, a.terms)?;
    let mut t = Table::new(&["r", "density"]);
    t.meta("command", "density");
    let mut worst_tail = 0.0f64;
    let mut most_terms = 0usize;
    let mut push = |t: &mut Table, x: f64, v: tsum::densities::SeriesValue| {
        worst_tail = worst_tail.max(v.tail_bound);
        most_terms = most_terms.max(v.terms);
        t.rows.push(vec![Cell::Real(x), Cell::Real(v.value)]);
    };
    match a.law {
        DensityLaw::Fz => {
            let p = gauss_params(&a.params)?;
            t.meta("law", "fz");
            t.meta("params", p.digest());
            let s = GaussStudentSeries::new(p, tp)?;
            for &x in &grid {
                push(&mut t, x, s.eval_detailed(x.abs())?);
            }
        }
        DensityLaw::Fy => {
            let p = pair_params(&a.params)?;
            t.meta("law", "fy");
            t.meta("params", p.digest());
            let s = StudentPairSeries::new(p, tp)?;
            for &x in &grid {
                push(&mut t, x, s.eval_detailed(x.abs())?);
            }
        }
    }
    t.meta("eps", format!("{:e}", a.eps));
    t.trailer("tail_bound", format!("{worst_tail:.16e}"));
    t.trailer("max_terms", most_terms);
    Ok(Output::Table { command: "density", table: t })
}

fn sample(a: &SampleArgs) -> Result<Output, CliError> {
    let mut t = Table::new(&[]);
    t.meta("command", "sample");
    t.meta("seed", a.seed);
    t.meta("count", a.count);
    let points = match a.law {
        SampleLaw::K | SampleLaw::N => {
            let (name, draws) = match a.law {
                SampleLaw::K => {
                    let p = gauss_params(&a.params)?;
                    t.meta("params", p.digest());
                    ("k", sample_k(&p, a.count, a.seed)?)
                }
                _ => {
                    let p = pair_params(&a.params)?;
                    t.meta("params", p.digest());
                    ("n", sample_n(&p, a.count, a.seed)?)
                }
            };
            t.meta("law", name);
            t.columns = vec![name.to_string()];
            t.rows = draws.values.iter().map(|&v| vec![Cell::Int(v)]).collect();
            return Ok(Output::Table { command: "sample", table: t });
        }
        SampleLaw::Z => {
            let p = gauss_params(&a.params)?;
            t.meta("law", "z");
            t.meta("params", p.digest());
            ConvolutionSpec::GaussStudent { params: p, a1: a.params.a1, a2: a.params.a2 }.sample(a.count, a.seed)?
        }
        SampleLaw::Y => {
            let p = pair_params(&a.params)?;
            t.meta("law", "y");
            t.meta("params", p.digest());
            ConvolutionSpec::student_pair(p).sample(a.count, a.seed)?
        }
    };
    t.columns = (1..=points.dimension).map(|j| format!("x{j}")).collect();
    t.rows = points.iter().map(|x| x.iter().map(|&v| Cell::Real(v)).collect()).collect();
    Ok(Output::Table { command: "sample", table: t })
}

fn validate(a: &ValidateArgs) -> Result<Output, CliError> {
    let tp = policy(a.eps, None)?;
    let p = &a.params;
    let mut params = json!({ "check": format!("{:?}", a.check).to_lowercase() });
    let report = match a.check {
        Check::Convolution | Check::Fourier => {
            if p.d != 1 {
                return Err(CliError::Usage(format!("this check is one-dimensional, got --d {}", p.d)));
            }
            let (nu, mu) = (nu(p)?, mu(p)?);
            params["nu"] = json!(nu);
            params["mu"] = json!(mu);
            let tol = a.tol.unwrap_or(1e-6);
            params["tol"] = json!(tol);
            if a.check == Check::Convolution {
                let grid = parse_grid(a.grid.as_deref().unwrap_or("-10:10:0.1"))?;
                convolve_quadrature_1d(nu, mu, &grid, tp, tol)?
            } else {
                let grid = parse_grid(a.grid.as_deref().unwrap_or("0.1:10:0.1"))?;
                let settings = FourierSettings {
                    tolerance: tol,
                    max_terms: a.terms.unwrap_or(HARD_CAP),
                };
                fourier_product_check(nu, mu, &grid, settings)?
            }
        }
        Check::Montecarlo => {
            let spec = match a.law.ok_or_else(|| missing("--law"))? {
                McLaw::Z => ConvolutionSpec::GaussStudent {
                    params: gauss_params(p)?,
                    a1: p.a1,
                    a2: p.a2,
                },
                McLaw::Y => ConvolutionSpec::student_pair(pair_params(p)?),
            };
            params["params"] = json!(spec.digest());
            params["seed"] = json!(a.seed);
            params["count"] = json!(a.count);
            params["bins"] = json!(a.bins);
            mc_density_check(&spec, a.count, a.seed, a.bins, tp)?
        }
        Check::Moments | Check::Monotonicity => {
            let family = match a.family.ok_or_else(|| missing("--family"))? {
                FamilyArg::Alpha => Family::Alpha(gauss_params(p)?),
                FamilyArg::C => Family::C(pair_params(p)?),
            };
            params["family"] = serde_json::to_value(family).expect("params serialize");
            if a.check == Check::Moments {
                let tol = a.tol.unwrap_or(1e-6);
                params["rel_tol"] = json!(tol);
                moments_check(&family, a.terms.unwrap_or(200), tol)?
            } else {
                let tol = a.tol.unwrap_or(1e-12);
                params["tol"] = json!(tol);
                monotonicity_check(&family, a.terms.unwrap_or(31), 6, tol)?
            }
        }
    };
    Ok(Output::Report { params, report })
}

/// `f_Z` of `X + T` in one dimension (`X ~ N(0, σ²)`, `T ~ t_{2ν}`) next to
/// its first four series terms `α_k g_{k,σ}` and their sum.
pub fn figure1(nu: f64, sigma: f64, grid: &[f64], eps: f64) -> Result<Table, CliError> {
    let p = GaussStudentParams::new(1, nu, sigma)?;
    let series = GaussStudentSeries::new(p, policy(eps, None)?)?;
    let mut t = Table::new(&["z", "f_Z", "partial_sum_0_3", "term_0", "term_1", "term_2", "term_3"]);
    t.meta("command", "figure1");
    t.meta("params", p.digest());
    t.meta("eps", format!("{eps:e}"));
    let mut worst_tail = 0.0f64;
    for &z in grid {
        let f = series.eval_detailed(z.abs())?;
        worst_tail = worst_tail.max(f.tail_bound);
        let terms = series.terms(z.abs(), 4)?;
        let mut row = vec![Cell::Real(z), Cell::Real(f.value), Cell::Real(terms.iter().sum())];
        row.extend(terms.iter().map(|&v| Cell::Real(v)));
        t.rows.push(row);
    }
    t.trailer("tail_bound", format!("{worst_tail:.16e}"));
    Ok(t)
}
