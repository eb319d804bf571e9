fn main() {
    std::process::exit(lqg_codesign::cli::main_with_args(std::env::args_os()));
}
