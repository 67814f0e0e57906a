use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use eisenbasis::characters::{enumerate_characters, nebentypus_basis, DirichletCharacter};
use eisenbasis::eisenstein::{default_truncation, Combination, Kind, SpectralData};
use eisenbasis::hecke::{diamond, diamond_by_slash, tp_label, tp_qexp_twisted, Family, LabelCombination};
use eisenbasis::modgroup::{orbits, CongruenceSubgroup, GroupSpec, LatticePoint};
use eisenbasis::selfcheck::{self, Config};
use eisenbasis::Error;

#[derive(Parser, Debug)]
#[command(name = "eisenbasis", version, about = "Exact Eisenstein series bases on congruence subgroups")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BasisChoice {
    Spectral,
    Unnormalized,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cusps with amplitude, regularity and orbit size in C(Γ(N)).
    Cusps { group: String },
    /// Orbits of the group on Λ_N.
    Orbits { group: String },
    /// Spectral or unnormalized Eisenstein basis.
    Basis {
        group: String,
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long, value_enum, default_value_t = BasisChoice::Spectral)]
        kind: BasisChoice,
    },
    /// One series by label: G:x,y or E:x,y (level of the group), E1:x,y or E0:δ,λ₀ (orbital sums).
    Qexp {
        group: String,
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        label: String,
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Apply T_p (--p) or ⟨d⟩ (--d) to an E1/E0 label.
    Hecke {
        group: String,
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        label: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<i64>,
        /// Also compare against T_p on q-expansions.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Nebentypus basis of E_k(N, χ); --char takes an index or exp:a,b,... on the CRT generators.
    Neben {
        #[arg(long)]
        level: u32,
        #[arg(long = "char")]
        chi: String,
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Run the invariant suite.
    Selfcheck {
        /// Level window, e.g. 1..12.
        #[arg(long)]
        levels: Option<String>,
        /// Run only these checks (comma-separated numbers).
        #[arg(long)]
        only: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Math(Error),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => Failure::Usage(m),
            e => Failure::Math(e),
        }
    }
}

type Out = Result<(Value, String), Failure>;

fn parse_group(s: &str) -> Result<CongruenceSubgroup, Failure> {
    let spec: GroupSpec = s.parse()?;
    Ok(CongruenceSubgroup::new(&spec)?)
}

fn parse_pair(s: &str) -> Result<(i64, i64), Failure> {
    let (a, b) = s.split_once(',').ok_or_else(|| Failure::Usage(format!("expected x,y in {s:?}")))?;
    let num = |t: &str| t.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad integer {t:?}")));
    Ok((num(a)?, num(b)?))
}

enum Label {
    Single(Kind, i64, i64),
    Orbital(Family, i64, i64),
}

fn parse_label(s: &str) -> Result<Label, Failure> {
    let (tag, rest) = s.split_once(':').ok_or_else(|| Failure::Usage(format!("label {s:?} lacks ':'")))?;
    let (a, b) = parse_pair(rest)?;
    Ok(match tag {
        "G" => Label::Single(Kind::G, a, b),
        "E" => Label::Single(Kind::E, a, b),
        "E1" => Label::Orbital(Family::Gamma1, a, b),
        "E0" => Label::Orbital(Family::Gamma0, a, b),
        _ => return Err(Failure::Usage(format!("unknown label kind {tag:?}; use G, E, E1 or E0"))),
    })
}

fn parse_levels(s: &str) -> Result<Config, Failure> {
    let (a, b) = s.split_once("..").ok_or_else(|| Failure::Usage(format!("levels {s:?} should read A..B")))?;
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| Failure::Usage(format!("bad level {t:?}")));
    let (a, b) = (num(a)?, num(b)?);
    if a == 0 || a > b {
        return Err(Failure::Usage(format!("empty level range {s}")));
    }
    Ok(Config { min_level: a, max_level: b })
}

fn find_character(n: u32, s: &str) -> Result<DirichletCharacter, Failure> {
    let chars = enumerate_characters(n as u64);
    if let Some(list) = s.strip_prefix("exp:") {
        let exps = list
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| t.trim().parse::<u64>().map_err(|_| Failure::Usage(format!("bad exponent {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        return chars
            .into_iter()
            .find(|c| c.exponents == exps)
            .ok_or_else(|| Failure::Usage(format!("no character mod {n} with exponents {list}")));
    }
    let i: usize = s.parse().map_err(|_| Failure::Usage(format!("bad character {s:?}")))?;
    let count = chars.len();
    chars
        .into_iter()
        .nth(i)
        .ok_or_else(|| Failure::Usage(format!("character index {i} out of range (mod {n} has {count})")))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Cusps { group } => {
            let g = parse_group(group)?;
            let d = SpectralData::new(&g);
            let cusps = d.cusps();
            let mut text = format!("{} cusps of {}\n", cusps.len(), g.spec());
            for c in &cusps {
                let _ = writeln!(
                    text,
                    "{:>8}  amplitude {:<3} {:<9} orbit size {}",
                    c.to_string(),
                    c.amplitude,
                    if c.regular { "regular" } else { "irregular" },
                    c.orbit_size
                );
            }
            Ok((json!({"group": g.spec().to_string(), "cusps": cusps}), text))
        }
        Command::Orbits { group } => {
            let g = parse_group(group)?;
            let os = orbits(&g);
            let mut text = format!("{} orbits of {} on Lambda_{}\n", os.len(), g.spec(), g.level());
            for o in &os {
                let pts: Vec<String> = o.points.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(text, "{} {}", if o.regular { "R" } else { "I" }, pts.join(" "));
            }
            Ok((json!({"group": g.spec().to_string(), "orbits": os}), text))
        }
        Command::Basis { group, weight, trunc, kind } => {
            let g = parse_group(group)?;
            let j = trunc.unwrap_or_else(|| default_truncation(g.level()));
            let kind = match kind {
                BasisChoice::Spectral => Kind::E,
                BasisChoice::Unnormalized => Kind::G,
            };
            let b = SpectralData::new(&g).basis(kind, *weight, j)?;
            Ok((to_value(&b), b.to_text()))
        }
        Command::Qexp { group, weight, label, trunc } => {
            let g = parse_group(group)?;
            let n = g.level();
            let j = trunc.unwrap_or_else(|| default_truncation(n));
            let f = match parse_label(label)? {
                Label::Single(kind, x, y) => {
                    let p = LatticePoint::new(n, x, y)
                        .ok_or_else(|| Error::Parameter(format!("({x},{y}) does not have order {n}")))?;
                    Combination::single(kind, *weight, p).expand(j)?
                }
                Label::Orbital(fam, a, b) => LabelCombination::label(Kind::E, fam, *weight, n, a, b)?.expand(j)?,
            };
            Ok((to_value(&f), f.to_text()))
        }
        Command::Hecke { group, weight, label, p, d, verify, trunc } => {
            let g = parse_group(group)?;
            let n = g.level();
            let (fam, a, b) = match parse_label(label)? {
                Label::Orbital(fam, a, b) => (fam, a, b),
                Label::Single(..) => return Err(Failure::Usage("hecke acts on E1 or E0 labels".into())),
            };
            let c = LabelCombination::label(Kind::E, fam, *weight, n, a, b)?;
            let (op, img) = match (p, d) {
                (Some(p), None) => (format!("T_{p}"), tp_label(*p, &c)?),
                (None, Some(d)) => (format!("<{d}>"), diamond(*d, &c)?),
                _ => return Err(Failure::Usage("give exactly one of --p and --d".into())),
            };
            let mut v = json!({"operator": op, "input": c, "image": img});
            let mut text = format!("{op} {c} = {img}\n");
            if *verify {
                let p = p.ok_or_else(|| Failure::Usage("--verify needs --p".into()))?;
                let jq = trunc.unwrap_or(10);
                let lhs = img.expand(jq * n as usize)?.project(1)?;
                let big = jq * n as usize * p as usize;
                let twist = diamond_by_slash(p as i64, &c)?.expand(big)?;
                let rhs = tp_qexp_twisted(&c.expand(big)?, &twist, p, *weight)?;
                let ok = lhs == rhs;
                v["verified"] = json!(ok);
                let _ = writeln!(text, "q-expansion check to q^{jq}: {}", if ok { "agrees" } else { "DISAGREES" });
                if !ok {
                    return Err(Failure::Math(Error::Internal(format!("T_{p} on labels and on q-expansions disagree"))));
                }
            }
            Ok((v, text))
        }
        Command::Neben { level, chi, weight, trunc } => {
            let chi = find_character(*level, chi)?;
            let j = trunc.unwrap_or_else(|| default_truncation(*level));
            let b = nebentypus_basis(*level, &chi, *weight, j)?;
            let mut text = format!("character #{} mod {} (parity {:+}, order {})\n", chi.index, chi.modulus, chi.parity(), chi.order());
            for (u, v) in chi.table() {
                let _ = writeln!(text, "  chi({u}) = {v}");
            }
            text.push_str(&b.to_text());
            Ok((json!({"character": chi, "basis": b}), text))
        }
        Command::Selfcheck { levels, only } => {
            let cfg = match levels {
                Some(s) => parse_levels(s)?,
                None => Config::default(),
            };
            let ids: Vec<u8> = match only {
                Some(s) => s
                    .split(',')
                    .map(|t| match t.trim().parse::<u8>() {
                        Ok(i) if (1..=10).contains(&i) => Ok(i),
                        _ => Err(Failure::Usage(format!("no check numbered {t:?}"))),
                    })
                    .collect::<Result<_, _>>()?,
                None => (1..=10).collect(),
            };
            let results: Vec<_> = ids.iter().map(|&i| selfcheck::run_check(i, &cfg)).collect();
            let mut text = String::new();
            for r in &results {
                let _ = writeln!(
                    text,
                    "{} {:>2} {} ({} cases, {:.1}s)",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.id,
                    r.name,
                    r.cases,
                    r.seconds
                );
                for f in &r.failures {
                    let _ = writeln!(text, "       {f}");
                }
            }
            let v = json!({"levels": [cfg.min_level, cfg.max_level], "results": results});
            if results.iter().all(|r| r.passed) {
                Ok((v, text))
            } else {
                emit(cli, &v, &text).map_err(Failure::Usage)?;
                Err(Failure::Checks(format!("{} checks failed", results.iter().filter(|r| !r.passed).count())))
            }
        }
    }
}

fn emit(cli: &Cli, v: &Value, text: &str) -> Result<(), String> {
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(v).expect("json") + "\n",
        Format::Text => text.to_string(),
    };
    match &cli.out {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(body.as_bytes()).and_then(|_| out.flush()) {
                // a closed pipe (e.g. `| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("cannot write output: {e}")),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((v, text)) => match emit(&cli, &v, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(m) => {
                eprintln!("error: {m}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Math(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parameter(_) | Error::Domain(_) | Error::EmptySpace(_) => 2,
                Error::Parse(_) => 1,
                _ => 3,
            };
            ExitCode::from(code)
        }
        Err(Failure::Checks(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
