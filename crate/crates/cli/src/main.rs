fn main() {
    std::process::exit(matdyn_cli::run(std::env::args_os()));
}
