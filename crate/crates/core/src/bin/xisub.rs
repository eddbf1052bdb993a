fn main() {
    let outcome = xisub::cli::run(std::env::args_os());
    if let Err(e) = xisub::cli::emit(&outcome) {
        eprintln!("error: {e}");
        std::process::exit(xisub::cli::EXIT_USAGE);
    }
    std::process::exit(outcome.code);
}
