//! End-to-end tests of the command-line surface: the documented example
//! invocations, output formats, JSON round-trips, byte determinism, and
//! exit codes of the installed binary.

use std::path::PathBuf;
use std::process::Command;

use curv::dim::Dimension;
use curv_cli::args::{self, parse_grid};
use curv_cli::commands;
use curv_cli::report::{AnalyzeOut, CheckCdOut, CurvatureOut, FunctionOut, ProductOut};
use curv_cli::CliError;

fn run(argv: &[&str]) -> Result<String, CliError> {
    let mut full = vec!["curv"];
    full.extend_from_slice(argv);
    curv_cli::run(full)
}

fn run_ok(argv: &[&str]) -> String {
    run(argv).unwrap_or_else(|e| panic!("command {argv:?} failed: {e}"))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Rows of a CSV body as (vertex, n, k, sharp).
fn csv_rows(text: &str) -> Vec<(usize, Dimension, f64, bool)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("vertex,n,k,sharp"), "fixed CSV header");
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 4, "CSV row {line:?} must have 4 fields");
            (
                f[0].parse().unwrap(),
                Dimension::parse(f[1]).unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("curv_cli_{}_{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curv"))
}

// ------------------------------------------------------------ example runs

#[test]
fn k5_every_vertex_is_3_5_at_infinity() {
    let json = run_ok(&["curvature", "--family", "K5", "--at", "inf", "--format", "json"]);
    let out: CurvatureOut = serde_json::from_str(&json).unwrap();
    assert_eq!(out.reports.len(), 5);
    for r in &out.reports {
        assert_eq!(r.samples.len(), 1);
        let p = &r.samples[0];
        assert_eq!(p.n, Dimension::Infinite);
        assert!(close(p.k, 3.5, 1e-9), "K5 vertex {}: {}", r.vertex, p.k);
        assert!(p.sharp);
    }
}

#[test]
fn k26_fails_cd_zero_at_the_degree_two_vertices() {
    let json = run_ok(&[
        "curvature", "--family", "K2,6", "--at", "100", "--check-cd", "0", "--format", "json",
    ]);
    let out: CurvatureOut = serde_json::from_str(&json).unwrap();
    let cd = out.cd.expect("CD summary present");
    assert!(!cd.ok);
    assert_eq!(cd.failing_vertices, vec![2, 3, 4, 5, 6, 7]);
    assert!(cd.witness_vertex >= 2);
    assert!(close(cd.min_k, -0.04, 1e-9));

    let table = run_ok(&[
        "curvature", "--family", "K2,6", "--at", "100", "--check-cd", "0",
    ]);
    assert!(table.contains("CD(0): FAIL"));
    assert!(table.contains("failing vertices: 2, 3, 4, 5, 6, 7"));
}

#[test]
fn edge_list_input_renders_csv_rows() {
    // A 4-cycle given as a file, with a comment line.
    let path = temp_file("c4.txt", "# a square\n0 1\n1 2\n2 3\n0 3\n");
    let csv = run_ok(&[
        "curvature", "--edges", path.to_str().unwrap(), "--grid", "1,2,inf", "--format", "csv",
    ]);
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 4 * 3);
    for (v, n, k, _) in rows {
        assert!(v < 4);
        // 2 - 4/N on C4, clamped at the N = 2 break.
        let want = match n {
            Dimension::Finite(x) => {
                if x < 2.0 {
                    2.0 - 4.0 / x
                } else {
                    0.0
                }
            }
            Dimension::Infinite => 2.0,
        };
        assert!(close(k, want, 1e-9), "C4 vertex {v} at {n}: {k}");
    }
    std::fs::remove_file(path).ok();
}

#[test]
fn product_function_passes_through_8_and_1_5() {
    let csv = run_ok(&[
        "function", "--family", "prod(K2,K3)", "--grid", "0.8:8:0.1", "--format", "csv",
    ]);
    let rows = csv_rows(&csv);
    // 73 grid points for each of the 6 product vertices.
    assert_eq!(rows.len(), 73 * 6);
    let at_8: Vec<f64> = rows
        .iter()
        .filter(|(_, n, _, _)| *n == Dimension::Finite(8.0))
        .map(|&(_, _, k, _)| k)
        .collect();
    assert_eq!(at_8.len(), 6, "grid must contain N = 8 exactly");
    for k in at_8 {
        assert!(close(k, 1.5, 1e-6), "K2 x K3 at N = 8: {k}");
    }
}

#[test]
fn tree4_plateaus_at_minus_two_past_n_equals_two() {
    let csv = run_ok(&["function", "--family", "tree4", "--vertex", "center"]);
    let rows = csv_rows(&csv);
    assert!(rows.len() >= 8);
    for (v, n, k, _) in rows {
        assert_eq!(v, 0);
        if let Dimension::Finite(x) = n {
            if x < 2.0 {
                assert!(k < -2.0);
                continue;
            }
        }
        assert!(close(k, -2.0, 1e-8), "tree4 center at {n}: {k}");
    }
}

#[test]
fn empty_grid_is_a_usage_error() {
    let err = run(&["function", "--family", "tree4", "--grid", ""]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("empty dimension grid"));
}

// ---------------------------------------------------------------- analyze

#[test]
fn analyze_shrikhande_reports_srg_and_sphere_spectrum() {
    let text = run_ok(&["analyze", "--family", "shrikhande", "--vertex", "0"]);
    assert!(text.contains("strongly regular: (16, 6, 2, 2)"));
    assert!(text.contains("K(N) = 3 - 12/N for N <= 12, then 2"));
    assert!(text.contains("sigma(A_S1): [-2, -1, -1, 1, 1, 2]"));
    assert!(text.contains("K(inf) = 2"));
    assert!(text.contains("S1-out-regular: yes (out-degree 3)"));
}

#[test]
fn analyze_star_hub_is_exceptional_with_three_components() {
    let text = run_ok(&["analyze", "--family", "K1,3", "--vertex", "center"]);
    assert!(text.contains("punctured 2-ball components: 3"));
    assert!(text.contains("exceptional shape: ThreeSpokes"));
    assert!(text.contains("K(inf) = 0"));

    let json = run_ok(&[
        "analyze", "--family", "K1,3", "--vertex", "center", "--format", "json",
    ]);
    let out: AnalyzeOut = serde_json::from_str(&json).unwrap();
    assert_eq!(out.vertices.len(), 1);
    let v = &out.vertices[0];
    assert_eq!(v.vertex, 0);
    assert_eq!(v.punctured_components, 3);
    assert_eq!(v.exceptional.as_deref(), Some("ThreeSpokes"));
    assert!(close(v.k_at_infty, 0.0, 1e-9));
}

#[test]
fn analyze_example7_shows_y_vertices_not_out_regular() {
    let json = run_ok(&["analyze", "--family", "paperexample7", "--format", "json"]);
    let out: AnalyzeOut = serde_json::from_str(&json).unwrap();
    assert_eq!(out.vertices.len(), 7);
    assert!(out.vertices[0].s1_out_regular, "x-vertices are out-regular");
    assert!(
        !out.vertices[3].s1_out_regular,
        "y-vertices are not out-regular"
    );
    assert!(out.srg.is_none());
    let text = run_ok(&["analyze", "--family", "example7", "--vertex", "3"]);
    assert!(text.contains("S1-out-regular: no"));
    assert!(text.contains("never (not S1-out-regular)"));
}

// ----------------------------------------------------------------- product

#[test]
fn product_star_agrees_with_engine() {
    let json = run_ok(&[
        "product", "K2", "star3:hub", "--grid", "1,2,4,16,inf", "--format", "json",
    ]);
    let out: ProductOut = serde_json::from_str(&json).unwrap();
    assert_eq!(out.left.vertex, 0);
    assert_eq!(out.right.vertex, 0);
    assert_eq!(out.product_vertex_count, 8);
    assert!(out.max_deviation <= 1e-7);
    for r in &out.rows {
        assert!(close(r.k_star, r.k_engine, 1e-7));
    }
}

// ---------------------------------------------------------------- check-cd

#[test]
fn check_cd_subcommand_verdicts() {
    let json = run_ok(&[
        "check-cd", "--family", "K5", "--k", "3.5", "--at", "inf", "--format", "json",
    ]);
    let out: CheckCdOut = serde_json::from_str(&json).unwrap();
    assert!(out.ok);
    assert_eq!(out.results.len(), 1);
    assert!(out.results[0].failing.is_empty());

    let json = run_ok(&[
        "check-cd", "--family", "K2,6", "--k", "0", "--grid", "3,inf", "--format", "json",
    ]);
    let out: CheckCdOut = serde_json::from_str(&json).unwrap();
    assert!(!out.ok, "fails at N = 3");
    assert_eq!(out.results[0].failing, vec![2, 3, 4, 5, 6, 7]);
    assert!(out.results[1].ok, "holds at N = inf");

    let table = run_ok(&["check-cd", "--family", "K2,6", "--k", "0", "--grid", "3,inf"]);
    assert!(table.contains("verdict: FAIL"));
}

// ------------------------------------------------- kinds, vertices, labels

#[test]
fn normalized_kind_scales_regular_graphs() {
    let csv = run_ok(&[
        "curvature", "--family", "Q3", "--kind", "normalized", "--at", "inf", "--format", "csv",
    ]);
    for (_, _, k, _) in csv_rows(&csv) {
        assert!(close(k, 2.0 / 3.0, 1e-9), "Q3 normalized at inf: {k}");
    }
}

#[test]
fn general_kind_takes_weights_and_measure() {
    let g = temp_file("wg.txt", "0 1 1.0\n1 2 2.0\n0 2 1.0\n");
    let m = temp_file("wm.txt", "0 2.0\n1 1.0\n2 1.5\n");
    let json = run_ok(&[
        "curvature", "--edges", g.to_str().unwrap(), "--measure", m.to_str().unwrap(),
        "--kind", "general", "--at", "inf", "--format", "json",
    ]);
    let out: CurvatureOut = serde_json::from_str(&json).unwrap();
    assert_eq!(out.reports.len(), 3);
    for r in &out.reports {
        assert!(r.samples[0].k.is_finite());
    }
    // The same measure without --kind general is rejected up front.
    let err = run(&[
        "curvature", "--edges", g.to_str().unwrap(), "--measure", m.to_str().unwrap(),
        "--at", "inf",
    ])
    .unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("--kind general"));
    // Non-unit weights are rejected for the unit-weight kinds.
    let err = run(&["curvature", "--edges", g.to_str().unwrap(), "--at", "inf"]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    std::fs::remove_file(g).ok();
    std::fs::remove_file(m).ok();
}

#[test]
fn vertex_selections_resolve() {
    let json = run_ok(&[
        "curvature", "--family", "P4", "--vertex", "0,2", "--at", "inf", "--format", "json",
    ]);
    let out: CurvatureOut = serde_json::from_str(&json).unwrap();
    let verts: Vec<usize> = out.reports.iter().map(|r| r.vertex).collect();
    assert_eq!(verts, vec![0, 2]);

    let json = run_ok(&[
        "curvature", "--family", "P4", "--vertex", "leaf", "--at", "inf", "--format", "json",
    ]);
    let out: CurvatureOut = serde_json::from_str(&json).unwrap();
    assert_eq!(out.reports.len(), 1);
    assert_eq!(out.reports[0].vertex, 0);

    let err = run(&["curvature", "--family", "K5", "--vertex", "hub", "--at", "inf"]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let err = run(&["curvature", "--family", "K5", "--vertex", "9", "--at", "inf"]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("out of range"));
}

#[test]
fn quoted_edge_list_names_become_labels() {
    let path = temp_file("named.txt", "\"a\" \"b\"\n\"b\" \"c\"\n");
    let text = run_ok(&[
        "analyze", "--edges", path.to_str().unwrap(), "--vertex", "1",
    ]);
    assert!(text.contains("vertex 1 (b)"), "label shown: {text}");
    std::fs::remove_file(path).ok();
}

// ------------------------------------------------------- grid spec parsing

#[test]
fn grid_specs_parse_and_normalize() {
    let g = parse_grid("0.8:8:0.1").unwrap();
    assert_eq!(g.len(), 73);
    assert_eq!(g[0], Dimension::Finite(0.8));
    assert_eq!(*g.last().unwrap(), Dimension::Finite(8.0));

    assert_eq!(
        parse_grid("inf,1").unwrap(),
        vec![Dimension::Finite(1.0), Dimension::Infinite]
    );
    assert_eq!(parse_grid("1,1,1").unwrap(), vec![Dimension::Finite(1.0)]);
    assert_eq!(
        parse_grid("1:2:0.5,10").unwrap(),
        vec![
            Dimension::Finite(1.0),
            Dimension::Finite(1.5),
            Dimension::Finite(2.0),
            Dimension::Finite(10.0)
        ]
    );
    assert!(parse_grid("2:1:1").is_err());
    assert!(parse_grid("1:2:0").is_err());
    assert!(parse_grid("1:2").is_err());
    assert!(parse_grid("0,1").is_err(), "dimensions must be positive");
    assert!(parse_grid("").is_err());
}

// -------------------------------------------------------- JSON round-trips

#[test]
fn json_outputs_round_trip_to_the_in_memory_reports() {
    let parse = |argv: &[&str]| {
        let mut full = vec!["curv"];
        full.extend_from_slice(argv);
        curv_cli::parse(full).unwrap().command
    };

    let args::Command::Curvature(a) =
        parse(&["curvature", "--family", "J(4,2)", "--grid", "1,5,inf", "--check-cd", "-3"])
    else {
        panic!("wrong subcommand")
    };
    let out = commands::cmd_curvature(&a).unwrap();
    let json = commands::render_curvature(&out, args::Format::Json).unwrap();
    let back: CurvatureOut = serde_json::from_str(&json).unwrap();
    assert_eq!(back, out);

    let args::Command::Function(a) = parse(&["function", "--family", "C5", "--grid", "2,inf"])
    else {
        panic!("wrong subcommand")
    };
    let out = commands::cmd_function(&a).unwrap();
    let json = commands::render_function(&out, args::Format::Json).unwrap();
    let back: FunctionOut = serde_json::from_str(&json).unwrap();
    assert_eq!(back, out);

    let args::Command::Analyze(a) = parse(&["analyze", "--family", "rook3", "--vertex", "0"])
    else {
        panic!("wrong subcommand")
    };
    let out = commands::cmd_analyze(&a).unwrap();
    let json = commands::render_analyze(&out, args::Format::Json).unwrap();
    let back: AnalyzeOut = serde_json::from_str(&json).unwrap();
    assert_eq!(back, out);

    let args::Command::Product(a) = parse(&["product", "K2", "C4", "--grid", "1,8,inf"]) else {
        panic!("wrong subcommand")
    };
    let out = commands::cmd_product(&a).unwrap();
    let json = commands::render_product(&out, args::Format::Json).unwrap();
    let back: ProductOut = serde_json::from_str(&json).unwrap();
    assert_eq!(back, out);

    let args::Command::CheckCd(a) =
        parse(&["check-cd", "--family", "crown4", "--k", "0", "--at", "inf"])
    else {
        panic!("wrong subcommand")
    };
    let out = commands::cmd_check_cd(&a).unwrap();
    let json = commands::render_check_cd(&out, args::Format::Json).unwrap();
    let back: CheckCdOut = serde_json::from_str(&json).unwrap();
    assert_eq!(back, out);
}

// ------------------------------------------------------------- binary runs

#[test]
fn binary_output_is_deterministic_byte_for_byte() {
    let args = [
        "curvature", "--family", "J(4,2)", "--grid", "1,5,inf", "--format", "json",
    ];
    let run = || {
        let out = bin().args(args).output().unwrap();
        assert!(out.status.success());
        assert!(out.stderr.is_empty());
        out.stdout
    };
    let a = run();
    let b = run();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn binary_exit_codes_follow_the_contract() {
    // 0: success.
    let out = bin().args(["curvature", "--family", "K4", "--at", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    // 0: --help.
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("curvature"));

    // 1: unparsable family.
    let out = bin().args(["curvature", "--family", "bogus99", "--at", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot parse family spec"));
    assert!(out.stdout.is_empty());

    // 1: empty grid.
    let out = bin().args(["function", "--family", "K4", "--grid", ""]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // 1: unknown flag (clap error, rendered on stderr).
    let out = bin().args(["curvature", "--family", "K4", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // 1: analyze has no CSV form.
    let out = bin().args(["analyze", "--family", "K4", "--format", "csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // 1: missing input source.
    let out = bin().args(["curvature", "--at", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // 2: isolated vertex (well-formed file, undefined curvature).
    let path = temp_file("iso.txt", "3 4\n");
    let out = bin()
        .args(["curvature", "--edges", path.to_str().unwrap(), "--at", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("isolated"));
    std::fs::remove_file(path).ok();
}
