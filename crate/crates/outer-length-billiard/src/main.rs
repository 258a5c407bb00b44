fn main() {
    std::process::exit(outer_length_billiard::cli::run());
}
