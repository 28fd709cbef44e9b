use clap::Parser;

use quadsolid_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok((report, code)) => {
            println!("{}", report.to_json());
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!(
                    "check failed: {} |{} - {}| > {}",
                    c.name, c.lhs, c.rhs, c.tolerance
                );
            }
            code
        }
        Err(e) => {
            eprintln!("quadsolid: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
