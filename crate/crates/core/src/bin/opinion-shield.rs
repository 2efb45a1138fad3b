fn main() {
    std::process::exit(opinion_shield::cli::run(std::env::args_os()));
}
