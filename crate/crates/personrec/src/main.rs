fn main() {
    std::process::exit(personrec::cli::run(std::env::args_os()));
}
