fn main() {
    std::process::exit(isolambda::cli::main());
}
