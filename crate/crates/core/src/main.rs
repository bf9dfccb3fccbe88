fn main() {
    std::process::exit(eqpoly::cli_main());
}
