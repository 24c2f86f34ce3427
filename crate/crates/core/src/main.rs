use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bdew::bell::{build_bell_basis, BellBasis, BellIndex, Convention, QTable};
use bdew::choi::{choi_delta, choi_lp, choi_positivity_window, choi_r_from_lp, choi_witness, delta_rational, ChoiParams};
use bdew::lp::{parse_lp, simplex_solve, LpStatus};
use bdew::product::{oracle_min_c, OracleSettings};
use bdew::rational::{fmt_q, parse_rational, q, to_f64, Q};
use bdew::region::region_report;
use bdew::spectral::{
    build_bound_state, critical_witness, decomposability_bound, detect, lambda_pm, lambda_positivity_bound,
    min_pt_eigenvalue, mu_lower_bound, pt_spectrum, w_lambda, BoundStateSpec, DETECT_THRESHOLD,
};
use bdew::tensor::{parse_cmat, write_cmat, Dims, TOL_EQ, TOL_SPEC};
use bdew::witness::{family_witness, window_hi, window_lo, Family};
use bdew::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "bdew", version, about = "Bell-diagonal entanglement witness toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump a generalized Bell basis, one state per row.
    BellBasis {
        #[arg(long)]
        dims: String,
        #[arg(long, default_value = "generic")]
        convention: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Witness(WitnessCmd),
    #[command(subcommand)]
    Lp(LpCmd),
    #[command(subcommand)]
    Region(RegionCmd),
    #[command(subcommand)]
    Oracle(OracleCmd),
    #[command(subcommand)]
    Nd(NdCmd),
    #[command(subcommand)]
    Choi(ChoiCmd),
    /// Regenerate every report into an output directory.
    Reproduce {
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    dims: Option<String>,
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    /// Write the critical witness of a family.
    Build {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print C_min and the critical r.
    Critical {
        #[command(flatten)]
        fam: FamilyArgs,
    },
}

#[derive(Subcommand, Debug)]
enum LpCmd {
    Solve { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum RegionCmd {
    Report {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    MinC {
        #[arg(long)]
        dims: String,
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value = "generic")]
        convention: String,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum NdCmd {
    PtSpectrum {
        #[arg(long)]
        x: String,
    },
    BoundState {
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "0")]
        eta: f64,
        #[arg(long)]
        zeta: f64,
        #[arg(long, default_value = "auto")]
        mu: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Detect {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct ChoiArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long, allow_hyphen_values = true)]
    c: String,
}

#[derive(Subcommand, Debug)]
enum ChoiCmd {
    Witness {
        #[command(flatten)]
        p: ChoiArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Lp {
        #[command(flatten)]
        p: ChoiArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Tsv,
    Human,
}

#[derive(Clone, Debug)]
struct RunConfig {
    tol_eq: f64,
    tol_spec: f64,
    detect_threshold: f64,
    oracle: OracleSettings,
    out_dir: PathBuf,
    format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol_eq: TOL_EQ,
            tol_spec: TOL_SPEC,
            detect_threshold: DETECT_THRESHOLD,
            oracle: OracleSettings::default(),
            out_dir: PathBuf::from("reports"),
            format: Format::Human,
        }
    }
}

impl RunConfig {
    fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected 'key = value'", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let bad = || Error::Parse(format!("config line {}: bad value '{v}' for {k}", no + 1));
            let pos = |x: f64| if x > 0.0 && x.is_finite() { Ok(x) } else { Err(bad()) };
            match k {
                "tol_eq" => cfg.tol_eq = pos(v.parse().map_err(|_| bad())?)?,
                "tol_spec" => cfg.tol_spec = pos(v.parse().map_err(|_| bad())?)?,
                "detect_threshold" => cfg.detect_threshold = pos(v.parse().map_err(|_| bad())?)?,
                "grid" | "grid_density" => cfg.oracle.grid_density = v.parse().map_err(|_| bad())?,
                "seed" => cfg.oracle.seed = v.parse().map_err(|_| bad())?,
                "refine_iters" => cfg.oracle.refine_iters = v.parse().map_err(|_| bad())?,
                "candidates" => cfg.oracle.candidates = v.parse().map_err(|_| bad())?,
                "starts" => cfg.oracle.starts = v.parse().map_err(|_| bad())?,
                "out" | "output_dir" => cfg.out_dir = PathBuf::from(v),
                "format" => {
                    cfg.format = match v {
                        "tsv" => Format::Tsv,
                        "human" => Format::Human,
                        _ => return Err(bad()),
                    }
                }
                _ => return Err(Error::Parse(format!("config line {}: unknown key '{k}'", no + 1))),
            }
        }
        Ok(cfg)
    }

    fn load() -> Result<Self> {
        match std::env::var_os("BDEW_CONFIG") {
            Some(p) => {
                let text = fs::read_to_string(&p)
                    .map_err(|e| Error::Io(format!("{}: {e}", Path::new(&p).display())))?;
                RunConfig::from_text(&text)
            }
            None => Ok(RunConfig::default()),
        }
    }

    fn oracle_with(&self, seed: Option<u64>, grid: Option<usize>) -> OracleSettings {
        let mut s = self.oracle.clone();
        if let Some(seed) = seed {
            s.seed = seed;
        }
        if let Some(g) = grid {
            s.grid_density = g;
        }
        s
    }
}

fn rational_arg(name: &str, s: &str) -> Result<Q> {
    let (v, approx) = parse_rational(s)?;
    if approx {
        eprintln!("warning: --{name} {s} rationalized to {}", fmt_q(&v));
    }
    Ok(v)
}

fn parse_dims(s: &str) -> Result<Dims> {
    let v: std::result::Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse::<usize>()).collect();
    Dims::new(v.map_err(|_| Error::Parse(format!("bad dims '{s}'")))?)
}

fn family_from_args(a: &FamilyArgs) -> Result<Family> {
    let name = Family::parse_name(&a.family)?;
    let need_n = || a.n.ok_or_else(|| Error::Parameter(format!("{name} needs --n")));
    let need_x = || -> Result<Q> {
        let s = a.x.as_deref().ok_or_else(|| Error::Parameter(format!("{name} needs --x")))?;
        rational_arg("x", s)
    };
    let f = match name {
        "multiqubit-a" => Family::MultiQubitA { n: need_n()?, x: need_x()? },
        "multiqubit-b" => Family::MultiQubitB { n: need_n()?, x: need_x()? },
        "two-by-n-a" => Family::TwoByNA { n: need_n()?, x: need_x()? },
        "two-by-n-b" => Family::TwoByNB { n: need_n()?, x: need_x()? },
        "three-three-x" => Family::ThreeThreeX { x: need_x()? },
        "three-three-x-prime" => Family::ThreeThreeXPrime { x: need_x()? },
        "reduction" => {
            let dims = match (&a.dims, a.n) {
                (Some(d), _) => parse_dims(d)?.factors().to_vec(),
                (None, Some(n)) => vec![2; n],
                (None, None) => vec![3, 3],
            };
            Family::Reduction { dims }
        }
        "lambda" => {
            let l = a.lambda.as_deref().ok_or_else(|| Error::Parameter("lambda needs --lambda".into()))?;
            Family::Lambda { x: need_x()?, lambda: rational_arg("lambda", l)? }
        }
        _ => unreachable!(),
    };
    f.validate()?;
    Ok(f)
}

fn choi_from_args(a: &ChoiArgs) -> Result<ChoiParams> {
    Ok(ChoiParams::new(rational_arg("a", &a.a)?, rational_arg("b", &a.b)?, rational_arg("c", &a.c)?))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn parse_q_tsv(basis: &BellBasis, text: &str) -> Result<QTable> {
    let arity = basis.dims().arity();
    let mut entries = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != arity + 1 {
            return Err(Error::Parse(format!("q line {}: expected {} indices and a value", no + 1, arity)));
        }
        let idx: BellIndex = toks[..arity]
            .iter()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("q line {}: bad index '{t}'", no + 1))))
            .collect::<Result<_>>()?;
        entries.insert(idx, rational_arg("q", toks[arity])?);
    }
    QTable::new(basis, entries)
}

fn run(cli: Cli, cfg: &RunConfig) -> Result<()> {
    match cli.command {
        Command::BellBasis { dims, convention, out } => {
            let basis = build_bell_basis(&parse_dims(&dims)?, Convention::parse(&convention)?)?;
            emit(&out, &write_cmat(&basis.as_matrix()))
        }
        Command::Witness(WitnessCmd::Build { fam, out }) => {
            let f = family_from_args(&fam)?;
            let m = match &f {
                Family::Lambda { x, lambda } => bdew::witness::combine_lambda(x, lambda)?,
                _ => family_witness(&f)?.matrix,
            };
            emit(&out, &write_cmat(&m))
        }
        Command::Witness(WitnessCmd::Critical { fam }) => {
            let f = family_from_args(&fam)?;
            let fw = family_witness(&f)?;
            match cfg.format {
                Format::Human => println!("c_min={} r_c={}", fmt_q(&fw.c_min), fmt_q(&fw.r_c)),
                Format::Tsv => println!("c_min\tr_c\n{}\t{}", fmt_q(&fw.c_min), fmt_q(&fw.r_c)),
            }
            Ok(())
        }
        Command::Lp(LpCmd::Solve { file }) => {
            let lp = parse_lp(&read(&file)?)?;
            let s = simplex_solve(&lp)?;
            match s.status {
                LpStatus::Optimal => {
                    let v: Vec<String> = s.vertex.iter().map(fmt_q).collect();
                    let b: Vec<String> = s.basis.iter().map(|i| i.to_string()).collect();
                    println!("status=optimal");
                    println!("value={}", fmt_q(&s.value));
                    println!("vertex={}", v.join(" "));
                    println!("basis={}", b.join(" "));
                    Ok(())
                }
                other => Err(Error::Parameter(format!("LP is {other:?}"))),
            }
        }
        Command::Region(RegionCmd::Report { fam, out, seed, grid }) => {
            let f = family_from_args(&FamilyArgs { x: fam.x.clone().or_else(|| Some("1/8".into())), ..fam })?;
            let r = region_report(&f, &cfg.oracle_with(seed, grid))?;
            emit(&out, &r.to_tsv())
        }
        Command::Oracle(OracleCmd::MinC { dims, q: qpath, convention, grid, seed }) => {
            let basis = build_bell_basis(&parse_dims(&dims)?, Convention::parse(&convention)?)?;
            let qt = parse_q_tsv(&basis, &read(&qpath)?)?;
            let r = oracle_min_c(&basis, &qt, &cfg.oracle_with(seed, grid))?;
            println!("c_min={:.12}", r.value);
            let a: Vec<String> = r.angles.iter().map(|t| format!("{t:.12}")).collect();
            println!("angles={}", a.join(" "));
            Ok(())
        }
        Command::Nd(NdCmd::PtSpectrum { x }) => {
            let x = rational_arg("x", &x)?;
            let s = pt_spectrum(&x)?;
            let mut o = String::new();
            let _ = writeln!(o, "x={}", fmt_q(&x));
            let _ = writeln!(o, "lambda_zero={:.15e}", s.lambda_zero);
            let _ = writeln!(o, "lambda_plus={:.15e}", s.lambda_plus);
            let _ = writeln!(o, "lambda_minus={:.15e}", s.lambda_minus);
            let ev: Vec<String> = s.numeric.iter().map(|v| format!("{v:.15e}")).collect();
            let _ = writeln!(o, "numeric={}", ev.join(" "));
            let _ = writeln!(o, "eigenvalue_residual={:.3e}", s.eigenvalue_residual());
            let _ = writeln!(o, "decomposition_residual={:.3e}", s.decomposition_residual());
            let _ = writeln!(o, "decomposability_bound={:.15e}", decomposability_bound(&x)?);
            let _ = writeln!(o, "lambda_positivity_bound={:.15e}", lambda_positivity_bound(&x)?);
            print!("{o}");
            Ok(())
        }
        Command::Nd(NdCmd::BoundState { x, eta, zeta, mu, out }) => {
            let x = rational_arg("x", &x)?;
            let mu = if mu == "auto" {
                None
            } else {
                Some(mu.parse::<f64>().map_err(|_| Error::Parse(format!("bad mu '{mu}'")))?)
            };
            let bs = build_bound_state(&BoundStateSpec { x: x.clone(), mu, eta, zeta })?;
            let (value, _) = detect(&critical_witness(&x)?, &bs.rho)?;
            eprintln!(
                "mu={:.12} min_eig={:.3e} min_pt_eig={:.3e} tr_w_rho={:.12e}",
                bs.mu, bs.min_eig, bs.min_pt_eig, value
            );
            emit(&out, &write_cmat(&bs.rho))
        }
        Command::Nd(NdCmd::Detect { witness, state }) => {
            let w = parse_cmat(&read(&witness)?)?;
            let rho = parse_cmat(&read(&state)?)?;
            let (value, _) = detect(&w, &rho)?;
            let detected = value < -cfg.detect_threshold;
            println!("tr_w_rho={value:.15e} detected={detected}");
            Ok(())
        }
        Command::Choi(ChoiCmd::Witness { p, out }) => {
            let p = choi_from_args(&p)?;
            emit(&out, &write_cmat(&choi_witness(&p)?))
        }
        Command::Choi(ChoiCmd::Lp { p, seed, grid }) => {
            let p = choi_from_args(&p)?;
            let delta = choi_delta(&cfg.oracle_with(seed, grid))?;
            let d = delta_rational(delta)?;
            let r = choi_lp(&p, &d)?;
            let r_lp = choi_r_from_lp(&r.lp_value)?.map(|v| fmt_q(&v)).unwrap_or_else(|| "none".into());
            println!("delta={delta:.12} delta_q={}", fmt_q(&d));
            println!("c_min={} r_c={}", fmt_q(&r.c_min), fmt_q(&r.r_c));
            println!("lp_value={} lp_r_c={r_lp} lp_value_half_delta={}", fmt_q(&r.lp_value), fmt_q(&r.lp_value_half_delta));
            Ok(())
        }
        Command::Reproduce { all, out } => {
            if !all {
                return Err(Error::Parameter("reproduce currently requires --all".into()));
            }
            let dir = out.unwrap_or_else(|| cfg.out_dir.clone());
            reproduce_all(&dir, cfg)
        }
    }
}

fn opt_q(v: Option<Q>) -> String {
    v.map(|x| fmt_q(&x)).unwrap_or_else(|| "-".into())
}

fn families_table() -> Result<String> {
    let mut s = String::from("family\tc_min\tr_c\treference_r_c\n");
    let mut fams = Vec::new();
    for n in 2..=4 {
        for k in 1..=9 {
            fams.push(Family::MultiQubitA { n, x: q(k, 10) });
        }
        fams.push(Family::MultiQubitB { n, x: q(1, 2) });
        fams.push(Family::Reduction { dims: vec![2; n] });
    }
    for n in [3usize, 4] {
        fams.push(Family::TwoByNA { n, x: q(1, 10) });
        fams.push(Family::TwoByNA { n, x: q(1, 2) });
        fams.push(Family::TwoByNB { n, x: q(1, 2) });
    }
    fams.push(Family::ThreeThreeX { x: window_lo() });
    fams.push(Family::ThreeThreeX { x: q(1, 8) });
    fams.push(Family::ThreeThreeX { x: window_hi() });
    for k in 0..=5 {
        fams.push(Family::ThreeThreeXPrime { x: q(k, 20) });
    }
    fams.push(Family::Reduction { dims: vec![3, 3] });
    for f in fams {
        if f.validate().is_err() {
            continue;
        }
        let fw = family_witness(&f)?;
        let _ = writeln!(s, "{f}\t{}\t{}\t{}", fmt_q(&fw.c_min), fmt_q(&fw.r_c), opt_q(f.reference_r_c()?));
    }
    Ok(s)
}

fn spectrum_table() -> Result<String> {
    let mut s = String::from("x\tlambda_plus\tlambda_minus\tnumeric_min\tnumeric_max\tdecomposability_bound\tlambda_bound\n");
    let (lo, hi) = (window_lo(), window_hi());
    for k in 0..=10 {
        let x = &lo + (&hi - &lo) * q(k, 10);
        let sp = pt_spectrum(&x)?;
        let (lp, lm) = lambda_pm(to_f64(&x));
        let mn = sp.numeric.iter().cloned().fold(f64::INFINITY, f64::min);
        let mx = sp.numeric.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            s,
            "{}\t{lp:.12}\t{lm:.12}\t{mn:.12}\t{mx:.12}\t{:.12}\t{:.12}",
            fmt_q(&x),
            decomposability_bound(&x)?,
            lambda_positivity_bound(&x)?
        );
    }
    Ok(s)
}

fn bound_state_table() -> Result<String> {
    let x = window_lo();
    let w = critical_witness(&x)?;
    let mut s = String::from("x\teta\tzeta\tmu\tmin_eig\tmin_pt_eig\ttr_w_rho\n");
    for zeta in [0.05, 0.1, 0.2] {
        let bs = build_bound_state(&BoundStateSpec { x: x.clone(), mu: None, eta: 0.0, zeta })?;
        let (v, _) = detect(&w, &bs.rho)?;
        let _ = writeln!(
            s,
            "{}\t0\t{zeta}\t{:.12}\t{:.3e}\t{:.3e}\t{v:.12}",
            fmt_q(&x),
            mu_lower_bound(&x, 0.0, zeta)?,
            bs.min_eig,
            bs.min_pt_eig
        );
    }
    Ok(s)
}

fn lambda_table() -> Result<String> {
    let mut s = String::from("x\tlambda_bound\tmin_pt_below\tmin_pt_above\n");
    let (lo, hi) = (window_lo(), window_hi());
    for k in 0..=4 {
        let x = &lo + (&hi - &lo) * q(k, 4);
        let b = lambda_positivity_bound(&x)?;
        let below = min_pt_eigenvalue(&w_lambda(&x, (b - 1e-3).max(0.0))?)?;
        let above = min_pt_eigenvalue(&w_lambda(&x, (b + 1e-3).min(1.0))?)?;
        let _ = writeln!(s, "{}\t{b:.12}\t{below:.6e}\t{above:.6e}", fmt_q(&x));
    }
    Ok(s)
}

fn choi_table(settings: &OracleSettings) -> Result<String> {
    let delta = choi_delta(settings)?;
    let d = delta_rational(delta)?;
    let mut s = format!("# delta={delta:.12} delta_q={}\n", fmt_q(&d));
    s.push_str("a\tb\tc\tstated_window\tnegative_eig\tc_min\tr_c\tlp_value\tlp_value_half_delta\n");
    for (a, b, c) in [(1, 1, 1), (2, 1, 0), (2, 1, 1), (3, 0, 0)] {
        let p = ChoiParams::ints(a, b, c);
        let w = choi_positivity_window(&p)?;
        let r = choi_lp(&p, &d)?;
        let _ = writeln!(
            s,
            "{a}\t{b}\t{c}\t{}\t{}\t{}\t{}\t{}\t{}",
            w.stated,
            w.negative_eigenvalue(),
            fmt_q(&r.c_min),
            fmt_q(&r.r_c),
            fmt_q(&r.lp_value),
            fmt_q(&r.lp_value_half_delta)
        );
    }
    Ok(s)
}

fn reproduce_all(dir: &Path, cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(dir)?;
    let write = |name: &str, text: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        println!("wrote {}", p.display());
        Ok(())
    };
    write("families.tsv", families_table()?)?;
    write("region_three_three_x.tsv", region_report(&Family::ThreeThreeX { x: q(1, 8) }, &cfg.oracle)?.to_tsv())?;
    write(
        "region_three_three_x_prime.tsv",
        region_report(&Family::ThreeThreeXPrime { x: q(1, 8) }, &cfg.oracle)?.to_tsv(),
    )?;
    write("pt_spectrum.tsv", spectrum_table()?)?;
    write("bound_state.tsv", bound_state_table()?)?;
    write("lambda_threshold.tsv", lambda_table()?)?;
    write("choi.tsv", choi_table(&cfg.oracle)?)?;
    let w = critical_witness(&window_lo())?;
    write("w_c_67_756.cmat", write_cmat(&w))?;
    write("w_red_3x3.cmat", write_cmat(&bdew::witness::reduction_witness(3)?))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match RunConfig::load() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c = RunConfig::from_text("seed = 7\n# comment\ngrid = 12\ntol_eq = 1e-9\nformat = tsv\n").unwrap();
        assert_eq!(c.oracle.seed, 7);
        assert_eq!(c.oracle.grid_density, 12);
        assert_eq!(c.tol_eq, 1e-9);
        assert_eq!(c.format, Format::Tsv);
        assert!(RunConfig::from_text("tol_eq = -1").is_err());
        assert!(RunConfig::from_text("bogus = 1").is_err());
        assert_eq!(RunConfig::default().oracle.seed, 42);
    }

    #[test]
    fn flags_override_config() {
        let c = RunConfig::from_text("seed = 7").unwrap();
        assert_eq!(c.oracle_with(Some(9), None).seed, 9);
        assert_eq!(c.oracle_with(None, None).seed, 7);
    }
}
