fn main() {
    std::process::exit(shiftcolor::commands::main_with(std::env::args_os()));
}
