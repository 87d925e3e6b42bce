use clap::Parser;

use repoforge_cli::commands::{self, Cli};

fn main() {
    let cli = Cli::parse();
    match commands::execute(&cli.command) {
        Ok(output) => {
            for note in &output.notes {
                eprintln!("note: {note}");
            }
            print!("{}", output.stdout);
        }
        Err(error) => {
            eprintln!("error: {error}");
            std::process::exit(commands::exit_code_for(&error));
        }
    }
}
