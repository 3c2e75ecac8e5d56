use anyhow::Context;
use clap::{Parser, Subcommand};
use rats_core::LectureId;
use rats_server::export::{self, Format};
use rats_server::store::ContentStore;
use rats_server::users::UserStore;
use rats_server::{seed, Config};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "rats", version, about = "RAT feedback service")]
struct Cli {
    /// TOML config file; RATS_* variables override it.
    #[arg(long, global = true, env = "RATS_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve,
    /// Create both stores and their schema files.
    Migrate,
    /// Load fixture files from a directory.
    Seed {
        #[arg(long)]
        fixtures: PathBuf,
    },
    /// Analyse questionnaire answers.
    SurveyAnalyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the analytics of one lecture.
    ExportDashboard {
        #[arg(long)]
        lecture: LectureId,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = Config::load(cli.config.as_deref(), std::env::vars())?;
    match cli.command {
        Command::Serve => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(rats_server::serve(config))?;
        }
        Command::Migrate => {
            let content = ContentStore::new(&config.content_dir).migrate()?;
            let users = UserStore::migrate(&config.user_dir)?;
            println!(
                "content store {}: {}",
                config.content_dir.display(),
                if content { "created" } else { "up to date" }
            );
            println!(
                "user store {}: {}",
                config.user_dir.display(),
                if users { "created" } else { "up to date" }
            );
        }
        Command::Seed { fixtures } => {
            let r = seed::seed(&config, &fixtures)?;
            println!("users: {} created, {} existing", r.users_created, r.users_existing);
            println!("concepts: {}", r.concepts);
            println!("lectures: {} created, {} existing", r.lectures_created, r.lectures_existing);
            println!(
                "rats: {} created ({} published), {} existing",
                r.rats_created, r.rats_published, r.rats_existing
            );
        }
        Command::SurveyAnalyze { input, out } => {
            let file = std::fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let responses = rats_survey::read_csv(file)?;
            let report = rats_survey::analyze(&responses);
            std::fs::write(&out, serde_json::to_string_pretty(&report)? + "\n")
                .with_context(|| format!("writing {}", out.display()))?;
            println!("{} respondents, {} users -> {}", report.respondents, report.users, out.display());
        }
        Command::ExportDashboard { lecture, format, out } => {
            let d = export::dashboard(&config, lecture)?;
            export::write(&d, format, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .json()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("RATS_LOG").unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
