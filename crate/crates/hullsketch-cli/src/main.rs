use clap::Parser;

fn main() {
    // Usage errors exit 2 via clap; --help and --version exit 0.
    let cli = match hullsketch_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => err.exit(),
    };
    if let Err(err) = hullsketch_cli::execute(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
