fn main() {
    std::process::exit(stripstat::cli::main_exit_code());
}
