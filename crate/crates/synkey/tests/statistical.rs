//! Seeded statistical audits of the samplers against the exact joint
//! laws. Seeds are fixed, so these cannot flake; the 0.999 chi-square
//! quantile keeps the criterion loose enough that only a real sampler
//! defect trips it.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use synkey::sources::{chi_square_statistic, SourceModel, TreeTopology};

fn quantile_999(df: usize) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(0.999)
}

#[test]
fn samplers_match_exact_pmfs() {
    let chain = TreeTopology::new(3, vec![(1, 2, 0.1), (2, 3, 0.2)]).unwrap();
    let cases: Vec<(SourceModel, usize)> = vec![
        (SourceModel::model1(0.1).unwrap(), 2),
        (SourceModel::model2(0.15, 0.3).unwrap(), 2),
        (SourceModel::model3(chain), 2),
        (SourceModel::model4(0.1, 0.3).unwrap(), 2),
    ];
    for (model, n) in cases {
        let d = model.terminals();
        let cells = 1usize << (d * n);
        let stat = chi_square_statistic(&model, n, 100_000, 0xC0FFEE);
        let bound = quantile_999(cells - 1);
        assert!(
            stat < bound,
            "model {}: chi-square {stat:.2} exceeds {bound:.2}",
            model.id()
        );
    }
}
