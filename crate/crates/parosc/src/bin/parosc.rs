fn main() {
    std::process::exit(parosc::cli::main_entry());
}
