//! Built-in demo programs.

pub const LOOP: &str = "var i;\ni := 0;\nwhile (i <= 9) {\n  i := i + 1;\n}\n";

pub const FIB: &str = "var a, b, i, t;\na := 0;\nb := 1;\ni := 0;\nwhile (i <= 9) {\n  t := a + b;\n  a := b;\n  b := t;\n  i := i + 1;\n}\n";

pub const NAMES: [&str; 2] = ["loop", "fib"];

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "loop" => Some(LOOP),
        "fib" => Some(FIB),
        _ => None,
    }
}
