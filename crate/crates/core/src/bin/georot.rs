fn main() {
    std::process::exit(georot::cli::main_with_std());
}
