use std::io::Write;

use clap::Parser;
use depower::{GridConfig, MeasureId, ScenarioId};
use depower_cli::{parse_config, Cli, CliError, Command, RunArgs};

fn run_args(argv: &[&str]) -> Result<RunArgs, clap::Error> {
    let mut full = vec!["depower", "run"];
    full.extend_from_slice(argv);
    match Cli::try_parse_from(full)?.command {
        Command::Run(args) => Ok(args),
        other => panic!("unexpected command {other:?}"),
    }
}

#[test]
fn no_arguments_gives_defaults() {
    let plan = parse_config(&run_args(&[]).unwrap()).unwrap();
    assert_eq!(plan.grid, GridConfig::default());
    assert_eq!(plan.out_dir.to_str(), Some("out"));
}

#[test]
fn flags_are_echoed() {
    let args = run_args(&["--scenarios", "linear", "--noise", "0.5,1.0", "--reps", "50", "--seed", "7"]).unwrap();
    let g = parse_config(&args).unwrap().grid;
    assert_eq!(g.scenarios, vec![ScenarioId::Linear]);
    assert_eq!(g.noise_grid, vec![0.5, 1.0]);
    assert_eq!(g.measures.len(), 3);
    assert_eq!((g.reps, g.master_seed), (50, 7));
}

#[test]
fn alpha_out_of_range_is_usage_error() {
    let err = parse_config(&run_args(&["--alpha", "1.5"]).unwrap()).unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("alpha"), "{err}");
}

#[test]
fn malformed_number_is_usage_error() {
    let err = parse_config(&run_args(&["--n", "ten"]).unwrap()).unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    assert!(err.to_string().contains("--n"));
}

#[test]
fn unknown_flag_is_rejected() {
    assert!(run_args(&["--colour", "red"]).is_err());
}

#[test]
fn measure_list_and_noise_range() {
    let args = run_args(&["--measures", "mic,cor", "--noise", "0.25:0.25:12", "--n", "100"]).unwrap();
    let g = parse_config(&args).unwrap().grid;
    assert_eq!(g.measures, vec![MeasureId::Mic, MeasureId::Cor]);
    assert_eq!(g.noise_grid.len(), 12);
    assert_eq!(g.noise_grid[3], 1.0);
    assert_eq!(g.noise_grid[11], 3.0);
}

#[test]
fn mic_needs_25_points() {
    assert!(parse_config(&run_args(&["--n", "20"]).unwrap()).is_err());
    assert!(parse_config(&run_args(&["--n", "20", "--measures", "cor,dcor"]).unwrap()).is_ok());
}

#[test]
fn flags_override_file_override_defaults() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# desk scale\nn = 100\nreps=40\nseed=3\nmeasures=dcor").unwrap();
    let path = file.path().to_str().unwrap().to_string();
    let plan = parse_config(&run_args(&["--config", &path, "--reps", "60"]).unwrap()).unwrap();
    assert_eq!(plan.grid.n, 100);
    assert_eq!(plan.grid.reps, 60);
    assert_eq!(plan.grid.master_seed, 3);
    assert_eq!(plan.grid.measures, vec![MeasureId::Dcor]);
    assert_eq!(plan.grid.alpha, 0.05);
}

#[test]
fn bad_config_file_lines_are_usage_errors() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "reps: 40").unwrap();
    let path = file.path().to_str().unwrap().to_string();
    let err = parse_config(&run_args(&["--config", &path]).unwrap()).unwrap_err();
    assert_eq!(err.exit_code(), 1);

    let missing = parse_config(&run_args(&["--config", "/nonexistent/cfg.txt"]).unwrap()).unwrap_err();
    assert!(matches!(missing, CliError::Io { .. }));
}
