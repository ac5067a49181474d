fn main() {
    std::process::exit(phasespace::cli::run());
}
