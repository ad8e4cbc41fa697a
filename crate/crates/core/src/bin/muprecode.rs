fn main() {
    std::process::exit(muprecode::cli::main_with_args(std::env::args_os()));
}
