use clap::Parser;

fn main() {
    let cli = qgan_lab::cli::Cli::parse();
    if let Err(e) = qgan_lab::cli::execute(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
