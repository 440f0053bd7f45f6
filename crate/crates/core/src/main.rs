fn main() {
    std::process::exit(qubit_relay::cli::run());
}
