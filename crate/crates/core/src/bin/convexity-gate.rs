fn main() {
    let (code, out) = convexity_gate::cli::run(std::env::args_os());
    println!("{out}");
    std::process::exit(code);
}
