//! Parameter sets compiled into the binary. A file with the same name next to
//! the config takes precedence.

const BUILTIN: &[(&str, &str)] = &[
    ("umaine-iea15", include_str!("../params/umaine-iea15.ini")),
    (
        "umaine-iea15-schedule",
        include_str!("../params/umaine-iea15-schedule.ini"),
    ),
    ("nmpz-demo", include_str!("../params/nmpz-demo.ini")),
    ("phi-minphase", include_str!("../params/phi-minphase.ini")),
    ("phi-nmpz", include_str!("../params/phi-nmpz.ini")),
    ("omega-minphase", include_str!("../params/omega-minphase.ini")),
    ("omega-nmpz", include_str!("../params/omega-nmpz.ini")),
    ("both-nmpz", include_str!("../params/both-nmpz.ini")),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(n, _)| *n)
}
