//! The argument surface and the small parsers behind it: dimension grids,
//! vertex selections, and `family[:class]` factor specs.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use curv::dim::Dimension;
use curv::families::{FamilySpec, VertexClass};
use curv::graph::{Graph, LaplacianKind};
use curv::linalg::Tolerances;

use crate::{usage, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "curv",
    version,
    about = "Bakry-Emery curvature functions of locally finite graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-vertex curvature reports on a dimension grid
    Curvature(CurvatureArgs),
    /// Flat (vertex, n, k, sharp) curvature samples for plotting
    Function(FunctionArgs),
    /// Structural diagnostics: out-regularity, sharpness, punctured 2-ball,
    /// sphere spectra, strong regularity
    Analyze(AnalyzeArgs),
    /// Curvature of a Cartesian product via the *-product of the factors
    Product(ProductArgs),
    /// Check CD(k, N) over every vertex of the graph
    CheckCd(CheckCdArgs),
}

/// Where the graph comes from: exactly one of a family spec or an edge list.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph family, e.g. K5, "K2,6", Q4, star5, crown8, P7, C6, tree4,
    /// J(5,2), rook4, cocktail3, shrikhande, paley13, torus7, dihedral14,
    /// example7, L(K3,3), prod(K2,K3), cayley(7x7;1,0;0,1)
    #[arg(long, value_name = "SPEC", conflicts_with = "edges")]
    pub family: Option<String>,
    /// Edge-list file: one `u v [w]` per line, `#` starts a comment
    #[arg(long, value_name = "PATH")]
    pub edges: Option<PathBuf>,
    /// Vertex-measure file: one `v mu` per line (requires --edges and
    /// --kind general)
    #[arg(long, value_name = "PATH", requires = "edges")]
    pub measure: Option<PathBuf>,
}

/// A loaded graph plus the family spec it came from, when it came from one.
pub struct LoadedInput {
    pub graph: Graph,
    pub family: Option<FamilySpec>,
}

impl InputArgs {
    pub fn load(&self, kind: LaplacianKind) -> Result<LoadedInput, CliError> {
        if self.measure.is_some() && kind != LaplacianKind::General {
            return Err(usage("--measure requires --kind general"));
        }
        let loaded = match (&self.family, &self.edges) {
            (Some(spec), None) => {
                let family: FamilySpec = spec.parse()?;
                LoadedInput {
                    graph: family.generate()?,
                    family: Some(family),
                }
            }
            (None, Some(path)) => {
                let text = read_file(path)?;
                let mut graph = Graph::parse_edge_list(&text)?;
                if let Some(mpath) = &self.measure {
                    graph = graph.parse_measure(&read_file(mpath)?)?;
                }
                LoadedInput {
                    graph,
                    family: None,
                }
            }
            _ => return Err(usage("exactly one of --family or --edges is required")),
        };
        kind.validate(&loaded.graph)?;
        Ok(loaded)
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

#[derive(Debug, Args)]
pub struct KindArg {
    /// Laplacian kind: non-normalized | normalized | general
    #[arg(long, default_value = "non-normalized", value_name = "KIND")]
    pub kind: String,
}

impl KindArg {
    pub fn resolve(&self) -> Result<LaplacianKind, CliError> {
        Ok(self.kind.parse::<LaplacianKind>()?)
    }
}

/// Dimension grid flags. `--grid` accepts a comma list whose items are
/// numbers, `inf`, or inclusive ranges `a:b:step`; `--at` is a one-point
/// shorthand. Leaving both out selects the default reporting grid.
#[derive(Debug, Args)]
pub struct GridArgs {
    /// Dimension grid, e.g. `1,2,inf` or `0.8:8:0.1`
    #[arg(long, value_name = "GRID", conflicts_with = "at")]
    pub grid: Option<String>,
    /// Single dimension value (number or `inf`)
    #[arg(long, value_name = "N")]
    pub at: Option<String>,
}

impl GridArgs {
    pub fn resolve(&self) -> Result<Vec<Dimension>, CliError> {
        match (&self.grid, &self.at) {
            (Some(g), None) => parse_grid(g),
            (None, Some(a)) => Ok(vec![Dimension::parse(a)?]),
            (None, None) => Ok(curv::engine::default_grid()),
            _ => Err(usage("--grid and --at are mutually exclusive")),
        }
    }
}

/// Parses a grid spec: comma-separated numbers, `inf`, and `a:b:step`
/// ranges, deduplicated and sorted ascending (`inf` last).
pub fn parse_grid(spec: &str) -> Result<Vec<Dimension>, CliError> {
    let mut out: Vec<Dimension> = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if item.contains(':') {
            let parts: Vec<&str> = item.split(':').collect();
            if parts.len() != 3 {
                return Err(usage(format!(
                    "range {item:?} must have the form a:b:step"
                )));
            }
            let num = |t: &str| -> Result<f64, CliError> {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("bad number {t:?} in range {item:?}")))
            };
            let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || a > b {
                return Err(usage(format!(
                    "range {item:?} needs finite a <= b and step > 0"
                )));
            }
            let mut k = 0u32;
            loop {
                let v = a + f64::from(k) * step;
                if v > b + step * 1e-9 {
                    break;
                }
                // Snap the last point onto the endpoint so `0.8:8:0.1`
                // contains 8 exactly despite accumulated rounding.
                let v = if (v - b).abs() <= step * 1e-9 { b } else { v };
                out.push(Dimension::finite(v)?);
                k += 1;
            }
        } else {
            out.push(Dimension::parse(item)?);
        }
    }
    if out.is_empty() {
        return Err(usage("empty dimension grid"));
    }
    out.sort_by(|x, y| x.partial_cmp(y).expect("grid values are never NaN"));
    out.dedup();
    Ok(out)
}

/// Numerical tolerance overrides; anything not given keeps its default.
#[derive(Debug, Args)]
pub struct TolArgs {
    /// Relative off-diagonal target of the eigensolver
    #[arg(long, value_name = "T")]
    pub eig_tol: Option<f64>,
    /// Semidefiniteness slack
    #[arg(long, value_name = "T")]
    pub psd_tol: Option<f64>,
    /// Kernel-membership threshold
    #[arg(long, value_name = "T")]
    pub zero_mult_tol: Option<f64>,
    /// Bisection interval width
    #[arg(long, value_name = "T")]
    pub bisect_tol: Option<f64>,
    /// Cross-route agreement threshold
    #[arg(long, value_name = "T")]
    pub agree_tol: Option<f64>,
}

impl TolArgs {
    pub fn resolve(&self) -> Result<Tolerances, CliError> {
        let mut tol = Tolerances::default();
        if let Some(v) = self.eig_tol {
            tol.eig_tol = v;
        }
        if let Some(v) = self.psd_tol {
            tol.psd_tol = v;
        }
        if let Some(v) = self.zero_mult_tol {
            tol.zero_mult_tol = v;
        }
        if let Some(v) = self.bisect_tol {
            tol.bisect_tol = v;
        }
        if let Some(v) = self.agree_tol {
            tol.agree_tol = v;
        }
        tol.validate()?;
        Ok(tol)
    }
}

#[derive(Debug, Args)]
pub struct VertexArg {
    /// Vertices: `all`, a comma list of indices, or (family inputs only) a
    /// class name: any, hub, leaf, next-to-leaf, inner, center, side-m,
    /// side-n, x, y
    #[arg(long, default_value = "all", value_name = "SEL")]
    pub vertex: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VertexSel {
    All,
    List(Vec<usize>),
    Class(VertexClass),
}

impl VertexArg {
    pub fn parse(&self) -> Result<VertexSel, CliError> {
        let t = self.vertex.trim();
        if t.eq_ignore_ascii_case("all") {
            return Ok(VertexSel::All);
        }
        if !t.is_empty() && t.split(',').all(|p| p.trim().parse::<usize>().is_ok()) {
            let mut list: Vec<usize> = t
                .split(',')
                .map(|p| p.trim().parse::<usize>().expect("checked above"))
                .collect();
            list.sort_unstable();
            list.dedup();
            return Ok(VertexSel::List(list));
        }
        match VertexClass::from_str(t) {
            Ok(c) => Ok(VertexSel::Class(c)),
            Err(_) => Err(usage(format!(
                "cannot parse vertex selection {t:?} (expected `all`, an index list, or a class name)"
            ))),
        }
    }
}

/// Turns a selection into concrete vertex indices, ascending.
pub fn resolve_vertices(
    sel: &VertexSel,
    graph: &Graph,
    family: Option<&FamilySpec>,
) -> Result<Vec<usize>, CliError> {
    match sel {
        VertexSel::All => Ok((0..graph.n()).collect()),
        VertexSel::List(list) => {
            for &v in list {
                if v >= graph.n() {
                    return Err(usage(format!(
                        "vertex {v} out of range (graph has {} vertices)",
                        graph.n()
                    )));
                }
            }
            Ok(list.clone())
        }
        VertexSel::Class(class) => {
            let family =
                family.ok_or_else(|| usage("vertex class selection requires --family"))?;
            Ok(vec![family.representative_vertex(*class)?])
        }
    }
}

/// Parses `family[:class]`; a missing class means `any`.
pub fn parse_factor(spec: &str) -> Result<(FamilySpec, VertexClass), CliError> {
    let (family_s, class_s) = match spec.rsplit_once(':') {
        Some((f, c)) => (f, Some(c)),
        None => (spec, None),
    };
    let family: FamilySpec = family_s.trim().parse()?;
    let class = match class_s {
        Some(c) => VertexClass::from_str(c.trim())?,
        None => VertexClass::Any,
    };
    Ok((family, class))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kind: KindArg,
    #[command(flatten)]
    pub vertex: VertexArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Also check CD(k, N) over the whole graph at every grid point
    #[arg(long = "check-cd", value_name = "K", allow_hyphen_values = true)]
    pub check_cd: Option<f64>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kind: KindArg,
    #[command(flatten)]
    pub vertex: VertexArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kind: KindArg,
    #[command(flatten)]
    pub vertex: VertexArg,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Output format (table or json)
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ProductArgs {
    /// Left factor as `family[:class]`, e.g. K2 or star3:hub
    #[arg(value_name = "LEFT")]
    pub left: String,
    /// Right factor as `family[:class]`
    #[arg(value_name = "RIGHT")]
    pub right: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckCdArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kind: KindArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Curvature lower bound to check
    #[arg(long, value_name = "K", allow_hyphen_values = true)]
    pub k: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_specs_split_on_the_last_colon() {
        let (f, c) = parse_factor("star3:hub").unwrap();
        assert_eq!(f, FamilySpec::Star(3));
        assert_eq!(c, VertexClass::Hub);
        let (f, c) = parse_factor("K2").unwrap();
        assert_eq!(f, FamilySpec::Complete(2));
        assert_eq!(c, VertexClass::Any);
        let (f, c) = parse_factor("cayley(5;1):any").unwrap();
        assert!(matches!(f, FamilySpec::AbelianCayley { .. }));
        assert_eq!(c, VertexClass::Any);
        assert!(parse_factor("K2:frobnicate").is_err());
        assert!(parse_factor(":hub").is_err());
    }

    #[test]
    fn vertex_selections_parse() {
        let arg = |s: &str| VertexArg { vertex: s.into() }.parse();
        assert_eq!(arg("all").unwrap(), VertexSel::All);
        assert_eq!(arg("ALL").unwrap(), VertexSel::All);
        assert_eq!(arg("3,1,2,1").unwrap(), VertexSel::List(vec![1, 2, 3]));
        assert_eq!(arg("7").unwrap(), VertexSel::List(vec![7]));
        assert_eq!(
            arg("side-n").unwrap(),
            VertexSel::Class(VertexClass::SideN)
        );
        assert_eq!(arg("center").unwrap(), VertexSel::Class(VertexClass::Center));
        assert!(arg("nonsense").is_err());
        assert!(arg("1,x").is_err(), "mixed list/class selections are rejected");
    }

    #[test]
    fn range_endpoint_is_snapped_exactly() {
        let g = parse_grid("0.8:8:0.1").unwrap();
        assert_eq!(*g.last().unwrap(), Dimension::Finite(8.0));
        // A range that overshoots its endpoint stops before it.
        let g = parse_grid("1:2.05:0.5").unwrap();
        assert_eq!(
            g,
            vec![
                Dimension::Finite(1.0),
                Dimension::Finite(1.5),
                Dimension::Finite(2.0)
            ]
        );
    }
}
