fn main() {
    let code = rlab::cli::run(std::env::args_os());
    std::process::exit(code);
}
