fn main() {
    std::process::exit(purgelab::cli::main_from_env());
}
