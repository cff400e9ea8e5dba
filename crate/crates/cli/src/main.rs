fn main() {
    std::process::exit(weylquant_cli::run(std::env::args_os()));
}
