use std::io::Write;

fn main() {
    let (code, stdout, stderr) = longrun::cli::run(std::env::args_os());
    let _ = std::io::stdout().lock().write_all(stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(stderr.as_bytes());
    std::process::exit(code);
}
