use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use serendipity::coefficients::{cmk_table, coefficient_table, render_cmk_tables};
use serendipity::export::{
    coefficients_to_json, read_custom_scheme, read_points_csv, write_evaluations_csv,
    write_nodes_csv, BasisJson,
};
use serendipity::multiindex::{face_of, serendipity_dimension, serendipity_set_with};
use serendipity::{GridScheme, Limits, SerendipityBasis};

#[derive(Parser, Debug)]
#[command(
    name = "serendipity",
    version,
    about = "Serendipity finite element bases on the n-cube"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension table of S_r, by formula and by enumeration.
    Dims {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 10)]
        max_r: u32,
        #[command(flatten)]
        output: Output,
    },
    /// List the multi-indices of S_r with their faces.
    IndexSet {
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        output: Output,
    },
    /// Nonzero combination coefficients c_alpha of S_r.
    Coeffs {
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        output: Output,
    },
    /// Table of c_{m,k}; all of n = 1..4 when --n is omitted.
    Cmk {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Node layout: index, point and derivative order per functional.
    Nodes {
        #[command(flatten)]
        order: Order,
        #[arg(long, default_value = "uniform")]
        scheme: String,
        #[command(flatten)]
        output: Output,
    },
    /// Build a basis and write it as JSON.
    Basis {
        #[command(flatten)]
        order: Order,
        #[arg(long, default_value = "uniform")]
        scheme: String,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate every function of a basis file at the points of a CSV file.
    Eval {
        /// Basis JSON written by `basis`.
        basis: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run the property checks; exits with status 1 if any fails.
    Verify {
        #[command(flatten)]
        order: Order,
        #[arg(long, default_value = "uniform")]
        scheme: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug)]
struct Order {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: u32,
    /// Guard rail on the dimension.
    #[arg(long, default_value_t = Limits::default().max_n)]
    max_n: usize,
    /// Guard rail on the order.
    #[arg(long, default_value_t = Limits::default().max_r)]
    max_r: u32,
}

impl Order {
    fn limits(&self) -> Limits {
        Limits {
            max_n: self.max_n,
            max_r: self.max_r,
        }
    }
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

impl Output {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn writer(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            ),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        let mut w = self.writer()?;
        w.write_all(text.as_bytes())?;
        if !text.ends_with('\n') {
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }
}

fn parse_scheme(name: &str) -> anyhow::Result<GridScheme> {
    if let Some(path) = name.strip_prefix("custom:") {
        let file = File::open(path).with_context(|| format!("opening scheme file {path}"))?;
        return Ok(read_custom_scheme(BufReader::new(file))?);
    }
    Ok(name.parse::<GridScheme>()?)
}

fn unsupported(cmd: &str, format: Format) -> anyhow::Error {
    anyhow::anyhow!("`{cmd}` does not support --format {format:?}")
}

fn cmd_dims(max_n: usize, max_r: u32, output: &Output) -> anyhow::Result<ExitCode> {
    Limits::default().check(max_n, max_r)?;
    let mut rows = Vec::new();
    let mut mismatch = false;
    for n in 1..=max_n {
        for r in 1..=max_r {
            let formula = serendipity_dimension(n, r)?;
            let enumerated = serendipity_set_with(n, r, &Limits::default())?.len() as u64;
            mismatch |= formula != enumerated;
            rows.push((n, r, formula, enumerated));
        }
    }
    let text = match output.format_or(Format::Text) {
        Format::Text => {
            let mut s = format!("{:>4} |", "n\\r");
            for r in 1..=max_r {
                s += &format!(" {r:>7} ");
            }
            s.push('\n');
            for n in 1..=max_n {
                s += &format!("{n:>4} |");
                for &(_, _, f, e) in rows.iter().filter(|row| row.0 == n) {
                    let mark = if f == e { ' ' } else { '!' };
                    s += &format!(" {f:>7}{mark}");
                }
                s.push('\n');
            }
            if mismatch {
                s += "MISMATCH between formula and enumeration (marked !)\n";
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("n,r,formula,enumerated\n");
            for (n, r, f, e) in &rows {
                s += &format!("{n},{r},{f},{e}\n");
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(
            &rows
                .iter()
                .map(|(n, r, f, e)| json!({"n": n, "r": r, "formula": f, "enumerated": e, "match": f == e}))
                .collect::<Vec<_>>(),
        )?,
    };
    output.emit(&text)?;
    Ok(if mismatch {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_index_set(order: &Order, output: &Output) -> anyhow::Result<ExitCode> {
    let set = serendipity_set_with(order.n, order.r, &order.limits())?;
    let text = match output.format_or(Format::Text) {
        Format::Text => set
            .iter()
            .map(|a| format!("{a}\t{}", face_of(a)))
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Csv => {
            let mut s = (1..=order.n)
                .map(|j| format!("alpha_{j}"))
                .collect::<Vec<_>>()
                .join(",");
            s.push('\n');
            for a in set.iter() {
                let cols: Vec<String> = a.entries().iter().map(u32::to_string).collect();
                s += &cols.join(",");
                s.push('\n');
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&set.iter().collect::<Vec<_>>())?,
    };
    output.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_coeffs(order: &Order, output: &Output) -> anyhow::Result<ExitCode> {
    order.limits().check(order.n, order.r)?;
    let table = coefficient_table(order.n, order.r)?;
    let text = match output.format_or(Format::Text) {
        Format::Text => table.to_text(),
        Format::Csv => {
            let mut s = String::from("alpha,m1,k,c\n");
            for (a, c) in table.iter() {
                let k = table.r - a.superlinear_degree();
                let entries: Vec<String> = a.entries().iter().map(u32::to_string).collect();
                s += &format!("{},{},{k},{c}\n", entries.join(" "), a.multiplicity(1));
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&json!({
            "n": table.n,
            "r": table.r,
            "coefficients": coefficients_to_json(&table),
        }))?,
    };
    output.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_cmk(n: Option<usize>, output: &Output) -> anyhow::Result<ExitCode> {
    let ns: Vec<usize> = match n {
        Some(n) => {
            Limits::default().check(n, 1)?;
            vec![n]
        }
        None => (1..=4).collect(),
    };
    let text = match output.format_or(Format::Text) {
        Format::Text => render_cmk_tables(&ns)?,
        Format::Json => {
            let tables = ns
                .iter()
                .map(|&n| Ok(json!({"n": n, "rows": cmk_table(n)?})))
                .collect::<anyhow::Result<Vec<_>>>()?;
            serde_json::to_string_pretty(&tables)?
        }
        Format::Csv => {
            let mut s = String::from("n,m,k,c\n");
            for &n in &ns {
                for (m, row) in cmk_table(n)?.iter().enumerate() {
                    for (k, c) in row.iter().enumerate() {
                        s += &format!("{n},{m},{k},{c}\n");
                    }
                }
            }
            s
        }
    };
    output.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn build(order: &Order, scheme: &str) -> anyhow::Result<SerendipityBasis> {
    let scheme = parse_scheme(scheme)?;
    Ok(SerendipityBasis::build_with_limits(
        order.n,
        order.r,
        &scheme,
        &order.limits(),
    )?)
}

fn cmd_nodes(order: &Order, scheme: &str, output: &Output) -> anyhow::Result<ExitCode> {
    let basis = build(order, scheme)?;
    match output.format_or(Format::Csv) {
        Format::Csv => {
            let mut w = output.writer()?;
            write_nodes_csv(&basis, &mut w)?;
        }
        Format::Json => {
            let nodes: Vec<_> = basis
                .functionals()
                .iter()
                .map(|(a, f)| {
                    json!({
                        "index": a,
                        "point": f.node.point.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "rho": f.derivative_order,
                    })
                })
                .collect();
            output.emit(&serde_json::to_string_pretty(&nodes)?)?;
        }
        f => return Err(unsupported("nodes", f)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_basis(order: &Order, scheme: &str, output: &Output) -> anyhow::Result<ExitCode> {
    let basis = build(order, scheme)?;
    match output.format_or(Format::Json) {
        Format::Json => {
            let doc = BasisJson::from_basis(&basis)?;
            output.emit(&serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Text => {
            let mut s = String::new();
            for (a, p) in basis.functions() {
                s += &format!("phi{a} = {p}\n");
            }
            output.emit(&s)?;
        }
        f => return Err(unsupported("basis", f)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(basis: &Path, points: &Path, output: &Output) -> anyhow::Result<ExitCode> {
    let file = File::open(basis).with_context(|| format!("opening {}", basis.display()))?;
    let doc: BasisJson = serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("parsing basis file {}", basis.display()))?;
    let functions = doc.polynomials()?;
    let file = File::open(points).with_context(|| format!("opening {}", points.display()))?;
    let pts = read_points_csv(BufReader::new(file), doc.n)?;
    if output.format_or(Format::Csv) != Format::Csv {
        bail!("`eval` only writes CSV");
    }
    let mut w = output.writer()?;
    write_evaluations_csv(&functions, &pts, doc.n, &mut w)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(order: &Order, scheme: &str, output: &Output) -> anyhow::Result<ExitCode> {
    let basis = build(order, scheme)?;
    let report = basis.verify();
    let text = match output.format_or(Format::Text) {
        Format::Text => report.to_string(),
        Format::Json => serde_json::to_string_pretty(&json!({
            "n": report.n,
            "r": report.r,
            "scheme": report.scheme,
            "passed": report.passed(),
            "checks": report.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "residual": c.residual.to_string(),
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        }))?,
        f => return Err(unsupported("verify", f)),
    };
    output.emit(&text)?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Dims {
            max_n,
            max_r,
            output,
        } => cmd_dims(*max_n, *max_r, output),
        Command::IndexSet { order, output } => cmd_index_set(order, output),
        Command::Coeffs { order, output } => cmd_coeffs(order, output),
        Command::Cmk { n, output } => cmd_cmk(*n, output),
        Command::Nodes {
            order,
            scheme,
            output,
        } => cmd_nodes(order, scheme, output),
        Command::Basis {
            order,
            scheme,
            output,
        } => cmd_basis(order, scheme, output),
        Command::Eval {
            basis,
            points,
            output,
        } => cmd_eval(basis, points, output),
        Command::Verify {
            order,
            scheme,
            output,
        } => cmd_verify(order, scheme, output),
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let io = cause.downcast_ref::<io::Error>().or_else(|| {
            match cause.downcast_ref::<csv::Error>()?.kind() {
                csv::ErrorKind::Io(io) => Some(io),
                _ => None,
            }
        });
        io.is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
