//! `readctl`: analyze text, generate readability-targeted paraphrases,
//! score runs and export reports.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CliConfig, Overrides};

/// Exit status and message of a failed command.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    /// Bad usage or unusable input: exit 2.
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    /// Failure while doing the work: exit 1.
    pub fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "readctl", version, about = "Readability-controlled paraphrase generation and evaluation")]
struct Cli {
    /// TOML config file; flags override its keys
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print word, sentence and syllable counts, the reading-ease score and its class
    Analyze {
        /// Text file; omit or use - for stdin
        path: Option<PathBuf>,
        /// Print JSON instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Generate paraphrases for every source and target level
    Generate {
        /// Stop after writing this many records, leaving the run resumable
        #[arg(long, value_name = "N")]
        stop_after: Option<usize>,
    },
    /// Score a finished run
    Score {
        /// Run id under the output directory, or a run directory
        run: String,
    },
    /// Export tables and charts for a scored run
    Report {
        /// Run id under the output directory, or a run directory
        run: String,
    },
    /// Corpus statistics and the reading-ease histogram
    Stats {
        /// Print JSON instead of a table
        #[arg(long)]
        json: bool,
    },
}

fn init_logging(verbose: u8) {
    let filter = match verbose {
        0 => "warn,readctl_gen=info",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(filter))
        .format_timestamp(None)
        .init();
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let mut config = match &cli.config {
        Some(path) => CliConfig::from_file(path)?,
        None => CliConfig::default(),
    };
    cli.overrides.apply(&mut config);
    match cli.command {
        Command::Analyze { path, json } => commands::analyze(path.as_deref(), json),
        Command::Generate { stop_after } => commands::generate(&config, stop_after),
        Command::Score { run } => commands::score(&config, &run),
        Command::Report { run } => commands::report(&config, &run),
        Command::Stats { json } => commands::stats(&config, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use clap::CommandFactory;

    use super::*;
    use config::EmbeddingKind;

    /// A config with every optional key set, so serialization shows all keys.
    fn full_config() -> CliConfig {
        let mut c = CliConfig::default();
        c.corpus.path = Some("corpus.csv".into());
        c.corpus.id_column = Some("id".into());
        c.provider.endpoint = Some("http://localhost/v1/chat/completions".into());
        c.provider.model_name = Some("m".into());
        c.provider.system_prompt = Some("s".into());
        c.pipeline.run_id = Some("r".into());
        c.embedding.kind = EmbeddingKind::HttpService;
        c.embedding.lexicon_path = Some("vectors.txt".into());
        c.embedding.url = Some("http://localhost:8000".into());
        c.embedding.model = Some("e".into());
        c.prompts.overrides.insert("65".into(), "Say it plainly:".into());
        c
    }

    fn config_keys() -> BTreeSet<String> {
        let value = toml::Value::try_from(full_config()).unwrap();
        let mut keys = BTreeSet::new();
        for (section, table) in value.as_table().unwrap() {
            for key in table.as_table().unwrap().keys() {
                keys.insert(format!("{section}.{key}"));
            }
        }
        keys
    }

    fn flag_for(key: &str) -> String {
        format!("--{}", key.replace(['.', '_'], "-"))
    }

    #[test]
    fn every_config_key_has_exactly_one_flag() {
        let help = Cli::command().render_long_help().to_string();
        let keys = config_keys();
        assert!(keys.len() >= 35, "{keys:?}");
        for key in &keys {
            assert!(help.contains(&format!("{} <", flag_for(key))), "no flag for {key}");
        }
        let expected: BTreeSet<String> = keys.iter().map(|k| flag_for(k)).collect();
        let overrides: BTreeSet<String> = Cli::command()
            .get_arguments()
            .filter(|a| a.get_help_heading().is_some_and(|h| h.starts_with("Configuration")))
            .filter_map(|a| a.get_long().map(|l| format!("--{l}")))
            .collect();
        assert_eq!(overrides, expected);
    }

    #[test]
    fn full_config_round_trips_through_toml() {
        let text = toml::to_string(&full_config()).unwrap();
        let back: CliConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, full_config());
        assert!(toml::from_str::<CliConfig>("[pipeline]\nmodee = \"copy\"\n").is_err());
    }

    #[test]
    fn flags_override_the_file() {
        let mut c: CliConfig = toml::from_str("[pipeline]\nmode = \"copy\"\nworkers = 3\n").unwrap();
        let cli = Cli::try_parse_from(["readctl", "--mode", "two-step", "--pipeline-targets", "5,40,95", "stats"]).unwrap();
        cli.overrides.apply(&mut c);
        assert_eq!(c.pipeline.mode, readctl_gen::Mode::TwoStep);
        assert_eq!(c.pipeline.workers, 3);
        assert_eq!(c.pipeline.targets, [5, 40, 95]);
    }

    #[test]
    fn targets_must_increase_and_exist() {
        let mut c = CliConfig::default();
        assert_eq!(c.targets().unwrap().len(), 8);
        c.pipeline.targets = vec![40, 20];
        assert_eq!(c.targets().unwrap_err().code, 2);
        c.pipeline.targets = vec![30];
        assert_eq!(c.targets().unwrap_err().code, 2);
    }
}
