fn main() {
    std::process::exit(rtngeo::main_with_args(std::env::args_os()));
}
