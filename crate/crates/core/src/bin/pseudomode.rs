fn main() {
    std::process::exit(pseudomode::cli::main());
}
