mod args;
mod commands;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use serde_json::{json, Value};
use toricsheaf::extension::universal_extension;
use toricsheaf::io::{self, SessionDocument, SheafDocument};
use toricsheaf::{fixtures, Divisor, Error, WeilDecoration};

use args::{Cli, CliCommand, Request};
use commands::{execute, parse_ints, Output, Source};

fn fixture(name: &str) -> Result<WeilDecoration> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let twist = || -> Result<i64> { Ok(arg.map(|a| a.trim().parse::<i64>()).transpose()?.unwrap_or(0)) };
    Ok(match base {
        "tangent-p2" => fixtures::tangent_p2(twist()?),
        "cotangent-p2" => fixtures::tangent_p2(0).dual_decoration()?,
        "line-p2" => WeilDecoration::line_bundle(fixtures::p2(), Divisor::new(vec![0, 0, twist()?]))?,
        "kaneyama-e2" => fixtures::kaneyama_e2(),
        "tangent-f1" => fixtures::tangent(&fixtures::f1()),
        "ext-f1" => {
            universal_extension(&fixtures::f1(), &Divisor::new(vec![0, 1, 1, 1]), &Divisor::new(vec![0, 0, 1, 0]))?
                .decoration
        }
        "ext-hexagon" => {
            universal_extension(
                &fixtures::hexagon_surface(),
                &Divisor::new(parse_ints("0,1,1,1,1,1")?),
                &Divisor::new(parse_ints("0,0,1,2,1,0")?),
            )?
            .decoration
        }
        _ => return Err(Error::Schema(format!("unknown fixture {name:?}")).into()),
    })
}

fn emit(out: &Output, as_json: bool) -> Result<()> {
    if as_json {
        println!("{}", serde_json::to_string_pretty(&out.json)?);
    } else {
        print!("{}", out.text);
    }
    Ok(())
}

/// Runs every request of a session, stopping at the first failure.
fn run_session(path: &str, verbose: bool) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    let doc: SessionDocument = io::parse_json(&text)?;
    let session = doc.build()?;
    let requests = session.requests.clone();
    let src = Source::Session(session);
    let mut results = Vec::with_capacity(requests.len());
    for (i, raw) in requests.into_iter().enumerate() {
        let req: Request = serde_json::from_value(raw).map_err(|e| Error::Schema(format!("request {i}: {e}")))?;
        results.push(execute(&req, &src, verbose)?.json);
    }
    Ok(json!({ "version": io::SCHEMA_VERSION, "results": results }))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        CliCommand::Fixture { name } => {
            println!("{}", serde_json::to_string_pretty(&SheafDocument::new(&fixture(&name)?))?);
            Ok(true)
        }
        CliCommand::Run { session } => {
            println!("{}", serde_json::to_string_pretty(&run_session(&session, cli.verbose)?)?);
            Ok(true)
        }
        CliCommand::Request(req) => {
            let out = execute(&req, &Source::Files, cli.verbose)?;
            emit(&out, cli.json)?;
            Ok(out.json.get("valid") != Some(&Value::Bool(false)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(1, Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
