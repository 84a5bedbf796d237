fn main() {
    let (code, out) = curveproj::cli::run(std::env::args());
    println!("{out}");
    std::process::exit(code);
}
