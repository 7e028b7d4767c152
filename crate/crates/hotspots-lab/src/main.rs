fn main() {
    std::process::exit(hotspots_lab::cli::run());
}
