use clap::Parser;
use multishape::cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; 1 = usage error
            let _ = e.print();
            std::process::exit(1);
        }
    };
    if let Err(e) = run(cli) {
        let code = e.exit_code();
        eprintln!("error exit={code}: {e}");
        std::process::exit(code);
    }
}
