// Driving the command line programmatically: parse a `.conn` document from
// stdin and run subcommands on it.

use elconn::cli::{dispatch, parse::parse};

fn run(args: &[&str], input: &str) -> (i32, String, String) {
    let mut stdin = input.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch(std::iter::once("elconn").chain(args.iter().copied()), &mut stdin, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let doc = "# two summands, one ramified\n\
               m = El(rho=u, phi=2*u^-1, R=[(1:1)]) (+) El(rho=u^2, phi=u^-3, R=[(res:1/4:2)]);\n";
    let parsed = parse(doc)?;
    println!("parsed: {}", parsed.get("m").unwrap());

    let (code, out, _) = run(&["invariants", "-"], doc);
    assert_eq!(code, 0);
    print!("{out}");

    let (code, out, _) = run(&["fourier", "--kind", "0inf", "--sign", "minus", "-"], doc);
    assert_eq!(code, 0);
    print!("fourier: {out}");

    let (code, out, _) = run(&["--json", "det", "-"], doc);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out)?;
    println!("det rank from json: {}", v["total"]["rank"]);

    let (code, _, err) = run(&["canon", "-"], "El(rho=u, phi=u^-1, R=[(1:1)]");
    assert_eq!(code, 2);
    print!("malformed input: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
