fn main() {
    std::process::exit(povm_lab::cli::run());
}
