//! Command arguments, shared by the command line and by session requests.
//! In a session, `sheaf` and divisor arguments name objects of the session.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "toricsheaf", version, about = "Exact cohomology of decorated toric sheaves")]
pub struct Cli {
    /// Print JSON instead of a human-readable rendering.
    #[arg(long, global = true)]
    pub json: bool,
    /// Show zero rows and extra detail.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    #[command(flatten)]
    Request(Request),
    /// Print a built-in sheaf as a JSON document.
    Fixture {
        /// tangent-p2[:l], cotangent-p2, line-p2:a, kaneyama-e2, tangent-f1, ext-f1, ext-hexagon
        name: String,
    },
    /// Execute every request of a session document.
    Run {
        #[arg(long)]
        session: String,
    },
}

#[derive(Subcommand, Debug, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Request {
    /// Check the decoration invariants and report local freeness.
    Validate(SheafArgs),
    /// Graded cohomology table.
    Cohomology(CohomologyArgs),
    /// Euler characteristic, cross-checked three ways.
    Euler(SheafArgs),
    /// Equivariant Euler characteristic as degree/coefficient pairs.
    EquivariantEuler(BoxedSheafArgs),
    /// Global sections in one degree.
    Sections(DegreeArgs),
    /// Klyachko filtrations, one per ray.
    Klyachko(KlyachkoArgs),
    /// Universal extension of O(D-) by O(D+).
    Extension(ExtensionArgs),
    /// Hasse diagram of the stratification in DOT.
    ExportHasse(SheafArgs),
    /// First page of the spectral sequence in one degree.
    ExportE1(DegreeArgs),
    /// Cell complex of the subdivision used in one degree.
    ExportCells(DegreeArgs),
}

#[derive(Args, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafArgs {
    /// Sheaf JSON file, or an object name in a session.
    #[arg(long)]
    pub sheaf: String,
}

#[derive(Args, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxedSheafArgs {
    /// Sheaf JSON file, or an object name in a session.
    #[arg(long)]
    pub sheaf: String,
    /// "auto" or lo1,lo2:hi1,hi2
    #[arg(long = "box", default_value = "auto", allow_hyphen_values = true)]
    #[serde(rename = "box", default = "auto")]
    pub degree_box: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    #[default]
    Cech,
    Polyhedral,
    Interior,
    Both,
}

#[derive(Args, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohomologyArgs {
    /// Sheaf JSON file, or an object name in a session.
    #[arg(long)]
    pub sheaf: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Cech)]
    #[serde(default)]
    pub method: MethodArg,
    /// "auto" or lo1,lo2:hi1,hi2
    #[arg(long = "box", default_value = "auto", allow_hyphen_values = true)]
    #[serde(rename = "box", default = "auto")]
    pub degree_box: String,
    /// Also run the interior variant and require agreement.
    #[arg(long)]
    #[serde(default)]
    pub interior_check: bool,
}

#[derive(Args, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeArgs {
    /// Sheaf JSON file, or an object name in a session.
    #[arg(long)]
    pub sheaf: String,
    /// Comma-separated lattice point, e.g. -1,0
    #[arg(long, allow_hyphen_values = true)]
    pub degree: String,
}

#[derive(Args, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KlyachkoArgs {
    /// Sheaf JSON file, or an object name in a session.
    #[arg(long)]
    pub sheaf: String,
    /// Restrict to one ray index.
    #[arg(long)]
    #[serde(default)]
    pub ray: Option<usize>,
}

#[derive(Args, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionArgs {
    /// A named variety (p2, p1xp1, f1, hexagon, p3) or a JSON variety file;
    /// ignored in sessions, which carry their own variety.
    #[arg(long, default_value = "p2")]
    #[serde(default)]
    pub variety: String,
    /// Comma-separated coefficients, or a divisor name in a session.
    #[arg(long, allow_hyphen_values = true)]
    pub dminus: String,
    #[arg(long, allow_hyphen_values = true)]
    pub dplus: String,
    /// Include the Hasse diagram of the extension in DOT.
    #[arg(long)]
    #[serde(default)]
    pub hasse: bool,
}

fn auto() -> String {
    "auto".into()
}
