fn main() -> std::process::ExitCode {
    piezo_blowup::cli::main_with(std::env::args_os())
}
