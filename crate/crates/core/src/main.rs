use clap::Parser;
use eulerprod::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let (code, body) = run(cli);
    if code == 0 {
        print!("{body}");
    } else {
        eprint!("{body}");
    }
    std::process::exit(code);
}
