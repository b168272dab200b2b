use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use argdist::dirichlet::{
    char_function_report, level_set_measure, moment_error_budget, moment_integral, sign_measure, v_grid,
};
use argdist::primes::{mertens_check, sieve, PrimeTable};
use argdist::report::{emit_report, histogram_svg, LIBRARY_VERSION};
use argdist::series::{coefficient_table, delta_moment, phi_series, write_coefficients_csv};
use argdist::valuedist::{
    compare_gaussian_law, compare_sign_expansion, write_reports_csv, ExpansionParams, MeasureReport,
    DEFAULT_ALLOWANCE,
};
use argdist::zetaline::{
    count_zeros_with, joint_moment, joint_moment_y, s_window_stats, ZeroCache, ZeroScanOptions,
};

const CACHE_ENV: &str = "ARGDIST_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "argdist", version, about = "Value distribution of the argument of zeta on the critical line")]
struct Cli {
    /// Flat key=value file; keys are the long flag names, flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Primary output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Zero cache directory; overrides ARGDIST_CACHE_DIR.
    #[arg(long = "cache-dir", global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Window {
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long = "H")]
    h: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prime table summary: count, sigma, Mertens deviation.
    Sieve {
        #[arg(long)]
        y: Option<u64>,
        /// Also write the table in the binary prime format.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// varpi_n, Phi_n and delta_2n for n <= order.
    Coeffs {
        #[arg(long)]
        y: Option<u64>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Samples of V_y on a window.
    Vgrid {
        #[arg(long)]
        y: Option<u64>,
        #[command(flatten)]
        w: Window,
    },
    /// Moment integrals of V_y against delta_n.
    Moments {
        #[arg(long)]
        y: Option<u64>,
        #[command(flatten)]
        w: Window,
        #[arg(long = "max-order")]
        max_order: Option<u32>,
    },
    /// Characteristic function of V_y against G.
    Charfn {
        #[arg(long)]
        y: Option<u64>,
        #[command(flatten)]
        w: Window,
        /// Comma-separated list.
        #[arg(long)]
        z: Option<String>,
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// mes or signed measure of level sets of V_y.
    Signmeasure {
        #[arg(long)]
        y: Option<u64>,
        #[command(flatten)]
        w: Window,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Zero ordinates of Z up to a height, in the zero cache format.
    Zeros {
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Histogram of normalized S on a window.
    Swindow {
        #[command(flatten)]
        w: Window,
        #[arg(long)]
        zdt: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Sign measure of V_y against the Hermite expansion.
    #[command(name = "compare-t3")]
    CompareT3 {
        #[arg(long)]
        y: Option<u64>,
        #[command(flatten)]
        w: Window,
        /// Comma-separated list.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        nu: Option<usize>,
        #[arg(long)]
        allowance: Option<f64>,
        /// Directory for one JSON report per alpha.
        #[arg(long = "json-dir")]
        json_dir: Option<PathBuf>,
    },
    /// Distribution of normalized S against the standard normal.
    #[command(name = "compare-t1")]
    CompareT1 {
        #[command(flatten)]
        w: Window,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        zdt: Option<f64>,
        #[arg(long)]
        allowance: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Joint moment of pi S + V_y against its upper bound.
    Jointmoment {
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long = "H")]
        h: Option<f64>,
        /// Comma-separated list.
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        zdt: Option<f64>,
    },
    /// Fast invariant suite; nonzero exit on any failure.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sieve { .. } => "sieve",
            Command::Coeffs { .. } => "coeffs",
            Command::Vgrid { .. } => "vgrid",
            Command::Moments { .. } => "moments",
            Command::Charfn { .. } => "charfn",
            Command::Signmeasure { .. } => "signmeasure",
            Command::Zeros { .. } => "zeros",
            Command::Swindow { .. } => "swindow",
            Command::CompareT3 { .. } => "compare-t3",
            Command::CompareT1 { .. } => "compare-t1",
            Command::Jointmoment { .. } => "jointmoment",
            Command::Selftest => "selftest",
        }
    }
}

/// Config file values overlaid by flags; records what was used.
struct Resolver {
    file: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl Resolver {
    fn new(path: Option<&Path>) -> Result<Self> {
        let mut file = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| anyhow!("config line {}: expected key=value, got {line:?}", i + 1))?;
                file.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Self {
            file,
            used: BTreeMap::new(),
        })
    }

    fn opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(s) => Some(s.parse::<T>().map_err(|e| anyhow!("config key {key}: {e} (value {s:?})"))?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.used.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        Ok(match self.opt(key, flag)? {
            Some(v) => v,
            None => {
                self.used.insert(key.to_string(), default.to_string());
                default
            }
        })
    }

    fn list<T>(&mut self, key: &str, flag: Option<String>, default: &str) -> Result<Vec<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.get(key, flag, default.to_string())?;
        raw.split(',')
            .map(|s| s.trim().parse::<T>().map_err(|e| anyhow!("{key}: bad list entry {s:?}: {e}")))
            .collect()
    }

    fn finish(&self) -> Result<()> {
        let unknown: Vec<&String> = self.file.keys().filter(|k| !self.used.contains_key(*k)).collect();
        if !unknown.is_empty() {
            bail!("config file has keys this command does not take: {unknown:?}");
        }
        Ok(())
    }

    fn header(&self, command: &str) -> String {
        let mut h = format!("# argdist {LIBRARY_VERSION}\n# command={command}\n");
        for (k, v) in &self.used {
            h.push_str(&format!("# {k}={v}\n"));
        }
        h
    }
}

struct Window3 {
    t: f64,
    h: f64,
    dt: f64,
}

fn window(r: &mut Resolver, w: Window, t: f64, h: f64, dt: f64) -> Result<Window3> {
    Ok(Window3 {
        t: r.get("T", w.t, t)?,
        h: r.get("H", w.h, h)?,
        dt: r.get("dt", w.dt, dt)?,
    })
}

fn cache_dir(cli_dir: Option<PathBuf>) -> Option<PathBuf> {
    cli_dir.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
}

/// Zero cache covering `upper`, loaded from and extended in the cache
/// directory when one is configured.
fn zeros_to(upper: f64, dt: f64, dir: Option<&Path>) -> Result<ZeroCache> {
    let opts = ZeroScanOptions {
        dt,
        ..ZeroScanOptions::default()
    };
    let Some(dir) = dir else {
        return Ok(count_zeros_with(upper, opts)?);
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating cache dir {}", dir.display()))?;
    let path = dir.join(format!("zeros-dt{dt}.txt"));
    if path.exists() {
        let mut cache = ZeroCache::load(&path)?;
        if cache.upper < upper {
            let from = cache.len();
            cache.extend_to(upper, opts)?;
            cache.append(&path, from)?;
        }
        return Ok(cache);
    }
    let cache = count_zeros_with(upper, opts)?;
    cache.save(&path)?;
    Ok(cache)
}

fn table(y: u64) -> Result<PrimeTable> {
    Ok(sieve(y)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut r = Resolver::new(cli.config.as_deref())?;
    let dir = cache_dir(cli.cache_dir.clone());
    let name = cli.command.name();
    let mut body: Vec<u8> = Vec::new();
    match cli.command {
        Command::Sieve { y, save } => {
            let y = r.get("y", y, 100_000u64)?;
            r.finish()?;
            let t = table(y)?;
            if let Some(p) = save {
                t.save(&p)?;
            }
            writeln!(body, "y,primes,sigma,sigma_2,mertens_deviation")?;
            writeln!(
                body,
                "{},{},{:e},{:e},{:e}",
                y,
                t.len(),
                t.sigma(),
                t.sigma_k(2),
                mertens_check(&t)?
            )?;
        }
        Command::Coeffs { y, order } => {
            let y = r.get("y", y, 10u64)?;
            let order = r.get("order", order, 5usize)?;
            r.finish()?;
            let rows = coefficient_table(&table(y)?, order)?;
            write_coefficients_csv(&mut body, &rows)?;
        }
        Command::Vgrid { y, w } => {
            let y = r.get("y", y, 10u64)?;
            let w = window(&mut r, w, 1e4, 100.0, 0.01)?;
            r.finish()?;
            v_grid(&table(y)?, w.t, w.h, w.dt)?.write_csv(&mut body)?;
        }
        Command::Moments { y, w, max_order } => {
            let y = r.get("y", y, 10u64)?;
            let w = window(&mut r, w, 1e4, 1e4, 0.01)?;
            let max_order = r.get("max-order", max_order, 4u32)?;
            r.finish()?;
            let t = table(y)?;
            let g = v_grid(&t, w.t, w.h, w.dt)?;
            let phi = phi_series(&t, (max_order / 2) as usize)?;
            writeln!(body, "n,integral,per_H,delta_n,budget,rule")?;
            for n in 1..=max_order {
                let m = moment_integral(&g, n)?;
                writeln!(
                    body,
                    "{},{:e},{:e},{:e},{:e},{:?}",
                    n,
                    m.value,
                    m.value / g.h(),
                    delta_moment(&t, n as usize, &phi)?,
                    moment_error_budget(n, y),
                    m.rule
                )?;
            }
        }
        Command::Charfn { y, w, z, n } => {
            let y = r.get("y", y, 10u64)?;
            let w = window(&mut r, w, 1e4, 1e4, 0.01)?;
            let zs: Vec<f64> = r.list("z", z, "0.1,0.25,0.5")?;
            let n = r.opt("N", n)?;
            r.finish()?;
            let t = table(y)?;
            let g = v_grid(&t, w.t, w.h, w.dt)?;
            writeln!(body, "z,re,im,analytic,deviation,remainder,quad_budget,N,hypothesis_ok")?;
            for z in zs {
                let c = char_function_report(&t, &g, z, n)?;
                writeln!(
                    body,
                    "{},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
                    c.z,
                    c.empirical_re,
                    c.empirical_im,
                    c.analytic,
                    c.deviation(),
                    c.remainder,
                    c.quad_budget,
                    c.n,
                    c.hypothesis_ok
                )?;
            }
        }
        Command::Signmeasure { y, w, alpha, beta } => {
            let y = r.get("y", y, 10u64)?;
            let w = window(&mut r, w, 1e4, 1e4, 0.01)?;
            let alpha = r.get("alpha", alpha, 0.0)?;
            let beta = r.opt("beta", beta)?;
            r.finish()?;
            let t = table(y)?;
            let g = v_grid(&t, w.t, w.h, w.dt)?;
            let value = match beta {
                Some(b) => level_set_measure(&t, &g, alpha, b)?,
                None => sign_measure(&t, &g, alpha),
            };
            writeln!(body, "T,H,y,alpha,beta,measure,per_H")?;
            let beta_s = beta.map(|b| b.to_string()).unwrap_or_default();
            writeln!(body, "{},{},{},{},{},{:e},{:e}", w.t, g.h(), y, alpha, beta_s, value, value / g.h())?;
        }
        Command::Zeros { to, dt } => {
            let to = r.get("to", to, 100.0)?;
            let dt = r.get("dt", dt, 0.05)?;
            r.finish()?;
            zeros_to(to, dt, dir.as_deref())?.truncated(to).write_to(&mut body, 0)?;
        }
        Command::Swindow { w, zdt, json, plot } => {
            let w = window(&mut r, w, 1e5, 1e4, 0.01)?;
            let zdt = r.get("zdt", zdt, 0.05)?;
            r.finish()?;
            let cache = zeros_to(w.t + w.h, zdt, dir.as_deref())?;
            let st = s_window_stats(&cache, w.t, w.h, w.dt)?;
            st.write_histogram_csv(&mut body)?;
            if let Some(p) = json {
                emit_report(&st, &config_map(&r, name), &p)?;
            }
            if let Some(p) = plot {
                std::fs::write(&p, histogram_svg(&st))?;
            }
        }
        Command::CompareT3 {
            y,
            w,
            alpha,
            nu,
            allowance,
            json_dir,
        } => {
            let y = r.get("y", y, 10u64)?;
            let w = window(&mut r, w, 1e4, 1e4, 0.01)?;
            let alphas: Vec<f64> = r.list("alpha", alpha, "-0.5,0,0.3,1")?;
            let nu = r.get("nu", nu, 3usize)?;
            let allowance = r.get("allowance", allowance, DEFAULT_ALLOWANCE)?;
            r.finish()?;
            let t = table(y)?;
            let g = v_grid(&t, w.t, w.h, w.dt)?;
            let phi = phi_series(&t, nu)?;
            let mut reports: Vec<MeasureReport> = Vec::new();
            for alpha in alphas {
                let p = ExpansionParams::new(&t, nu, alpha, None)?;
                reports.push(compare_sign_expansion(&t, &g, &p, &phi, allowance)?);
            }
            write_reports_csv(&mut body, &reports)?;
            if let Some(d) = json_dir {
                std::fs::create_dir_all(&d)?;
                let cfg = config_map(&r, name);
                for rep in &reports {
                    emit_report(rep, &cfg, &d.join(format!("compare-t3-alpha{}.json", rep.alpha)))?;
                }
            }
        }
        Command::CompareT1 {
            w,
            a,
            b,
            zdt,
            allowance,
            json,
            plot,
        } => {
            let w = window(&mut r, w, 1e5, 1e4, 0.01)?;
            let a = r.get("a", a, 0.0)?;
            let b = r.get("b", b, 40.0)?;
            let zdt = r.get("zdt", zdt, 0.05)?;
            let allowance = r.get("allowance", allowance, DEFAULT_ALLOWANCE)?;
            r.finish()?;
            let cache = zeros_to(w.t + w.h, zdt, dir.as_deref())?;
            let st = s_window_stats(&cache, w.t, w.h, w.dt)?;
            let rep = compare_gaussian_law(&st, a, b, allowance)?;
            write_reports_csv(&mut body, std::slice::from_ref(&rep))?;
            if let Some(p) = json {
                emit_report(&rep, &config_map(&r, name), &p)?;
            }
            if let Some(p) = plot {
                std::fs::write(&p, histogram_svg(&st))?;
            }
        }
        Command::Jointmoment { t, h, m, eps, zdt } => {
            let w = Window3 {
                t: r.get("T", t, 1e5)?,
                h: r.get("H", h, 1e4)?,
                dt: 0.0,
            };
            let ms: Vec<u32> = r.list("m", m, "1,2")?;
            let eps = r.get("eps", eps, 1e-3)?;
            let zdt = r.get("zdt", zdt, 0.05)?;
            r.finish()?;
            let cache = zeros_to(w.t + w.h, zdt, dir.as_deref())?;
            writeln!(body, "m,eps,y,value,bound,ratio,within_bound")?;
            for m in ms {
                let y = joint_moment_y(w.t, eps, m).floor() as u64;
                let t = if y >= 2 { Some(table(y)?) } else { None };
                let jm = joint_moment(&cache, t.as_ref(), w.t, w.h, m, eps)?;
                writeln!(
                    body,
                    "{},{},{},{:e},{:e},{:e},{}",
                    jm.m, jm.eps, jm.y, jm.value, jm.bound, jm.ratio, jm.within_bound
                )?;
            }
        }
        Command::Selftest => {
            r.finish()?;
            let log = argdist::selftest::run();
            body.extend(log.render().into_bytes());
            let failed = log.failures() > 0;
            write_out(cli.out.as_deref(), &r.header(name), &body)?;
            return Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS });
        }
    }
    write_out(cli.out.as_deref(), &r.header(name), &body)?;
    Ok(ExitCode::SUCCESS)
}

fn config_map(r: &Resolver, command: &str) -> BTreeMap<String, String> {
    let mut m = r.used.clone();
    m.insert("command".to_string(), command.to_string());
    m
}

fn write_out(path: Option<&Path>, header: &str, body: &[u8]) -> Result<()> {
    let mut all = header.as_bytes().to_vec();
    all.extend_from_slice(body);
    match path {
        Some(p) => std::fs::write(p, all).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&all)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("argdist: {e:#}");
            ExitCode::from(2)
        }
    }
}
