fn main() {
    std::process::exit(dqpt::cli::run());
}
