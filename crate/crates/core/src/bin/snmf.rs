fn main() {
    std::process::exit(stratified_nmf::cli::main_with_args(std::env::args_os()));
}
