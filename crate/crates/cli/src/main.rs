fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match qitk_cli::run(&args) {
        Ok(output) => {
            println!("{output}");
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code());
        }
    }
}
