fn main() {
    std::process::exit(lattice_sampling::cli::run());
}
