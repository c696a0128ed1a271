use super::curve::Curve2T;

/// Every curve with distinct roots in `[-10, 10]`, one per translation
/// class: sorted root gaps `a, b >= 1` with `a + b <= 20`, represented with
/// smallest root `-floor((a + b) / 2)`.
pub fn corpus() -> Vec<Curve2T> {
    let mut out = Vec::new();
    for span in 2..=20i64 {
        for a in 1..span {
            let e1 = -(span / 2);
            out.push(Curve2T::new([e1, e1 + a, e1 + span]).expect("distinct roots"));
        }
    }
    out
}
