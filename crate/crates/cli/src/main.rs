use std::io::Write;

fn main() {
    let out = rackforge_cli::run(std::env::args());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
