fn main() {
    let mut stdout = std::io::stdout();
    if let Err(e) = evochess_cli::run(std::env::args_os(), &mut stdout) {
        eprintln!("evochess: {e}");
        std::process::exit(e.exit_code());
    }
}
