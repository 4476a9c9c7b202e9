fn main() {
    std::process::exit(regbench::cli::main());
}
