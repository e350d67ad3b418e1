fn main() {
    std::process::exit(organmatch::cli::execute(std::env::args_os()));
}
