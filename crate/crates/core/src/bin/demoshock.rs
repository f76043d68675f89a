fn main() {
    std::process::exit(demoshock::cli::run(std::env::args_os()));
}
