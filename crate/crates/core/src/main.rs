fn main() {
    std::process::exit(tree_harmonic::cli::commands::run(std::env::args().collect()));
}
