use clap::Parser;

fn main() {
    let cli = polyjac::Cli::parse();
    let code = polyjac::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
