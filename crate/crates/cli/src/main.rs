use clap::Parser;

use polymoment_cli::cli::Cli;
use polymoment_cli::runner;

fn main() {
    let cli = Cli::parse();
    match runner::execute(&cli) {
        Ok((report, code)) => {
            if let Err(err) = report.write(cli.format, cli.out.as_deref()) {
                eprintln!("{err}");
                std::process::exit(err.exit_code());
            }
            std::process::exit(code);
        }
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    }
}
