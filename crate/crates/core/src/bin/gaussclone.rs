fn main() {
    std::process::exit(gaussclone::cli::main());
}
