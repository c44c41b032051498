fn main() {
    let code = kernelwalk::cli::run(std::env::args_os());
    std::process::exit(code);
}
