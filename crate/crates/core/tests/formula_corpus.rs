use mgw::formula::{parse, Formula};

const CORPUS: &[&str] = &[
    "d(x, y)",
    "d(x, e)",
    "d(x*y, y*x)",
    "d(x*y*inv(x)*inv(y), e)",
    "d(x*(y*x), e)",
    "d(inv(x*y), inv(y)*inv(x))",
    "0",
    "1",
    "1/2",
    "1-d(x, e)",
    "1-1-d(x, y)",
    "d(x, e) -. d(y, e)",
    "d(x, e) -. (1/2 -. d(y, e))",
    "min(d(x, e), d(y, e))",
    "max(d(x, e), 1/3)",
    "min(max(d(x, y), 1/4), d(y, e))",
    "2*d(x*y*inv(x)*inv(y), e)",
    "3*d(x*y, y*x)",
    "5/2*d(x, y)",
    "sup x. d(x, e)",
    "inf x. d(x, e)",
    "inf x. sup y. 2*d(x*y*inv(x)*inv(y), e)",
    "sup x. sup y. d(x*y, y*x)",
    "inf x. inf y. sup z. d(x*z, z*y)",
    "1-(sup y. d(x*y, y*x))",
    "1-(inf x. d(x, y))",
    "min(inf x. d(x, y), sup y. 1-d(x, y))",
    "max(d(x, e), 1-d(x, e)) -. 1/2",
    "2*(d(x, e) -. d(y, e))",
    "sup x. min(2*d(x*x, e), 1-d(x, e))",
];

#[test]
fn corpus_is_in_canonical_form() {
    for text in CORPUS {
        let f = parse(text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(&f.to_string(), text);
    }
}

#[test]
fn corpus_reparses_to_the_same_tree() {
    for text in CORPUS {
        let f: Formula = parse(text).unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }
}

#[test]
fn corpus_entries_are_distinct() {
    let set: std::collections::BTreeSet<_> = CORPUS.iter().collect();
    assert_eq!(set.len(), 30);
}
