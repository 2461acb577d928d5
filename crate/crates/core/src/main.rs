fn main() {
    std::process::exit(tores::frontend::cli::main(std::env::args_os()));
}
