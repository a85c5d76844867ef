use focj_web::{elim, eval, prove, sample_derivation, sample_model};

#[test]
fn prove_reports_status() {
    assert!(prove("=> P(c) \\/ ~c P(c)", 8).unwrap().contains("\"proved\""));
    assert!(prove("=> ~c P(c) ->i (top ->i ~c P(c))", 8).unwrap().contains("\"refuted\""));
    assert!(prove("=> (", 8).is_err());
}

#[test]
fn eval_on_sample_model() {
    assert!(eval(&sample_model(), "w", "~c P(c)").unwrap().contains("true"));
    assert!(eval(&sample_model(), "v", "~c P(c)").unwrap().contains("false"));
    assert!(eval("{}", "w", "P(c)").is_err());
}

#[test]
fn elim_on_cut_free_sample() {
    let out = elim(&sample_derivation()).unwrap();
    assert!(out.contains("ForallCR"));
    assert!(out.contains("\"trace\": []"));
}
