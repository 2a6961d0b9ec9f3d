fn main() -> std::process::ExitCode {
    lgl_cli::run::main_entry()
}
