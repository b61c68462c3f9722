// Six lifetime models fitted to the same data, ranked by AIC.

use mexed::competitors::{comparison_table, ecdf_overlay, kolmogorov_distance, kolmogorov_pvalue, ModelId};
use mexed::data::aircond;

pub fn run_example() -> mexed::Result<()> {
    let d = aircond();
    let rows = comparison_table(&d, &ModelId::ALL);
    let sorted = d.sorted();
    println!("{:<16} {:>10} {:>10} {:>10} {:>7} {:>7}", "model", "-log L", "AIC", "BIC", "KS", "p");
    for r in &rows {
        match &r.fit {
            Some(f) => {
                let ks = kolmogorov_distance(&sorted, |x| f.cdf(x));
                println!(
                    "{:<16} {:>10.4} {:>10.4} {:>10.4} {:>7.4} {:>7.4}",
                    f.model_id.name(),
                    f.neg_loglik,
                    f.aic,
                    f.bic,
                    ks,
                    kolmogorov_pvalue(ks, d.len())
                );
            }
            None => println!("{:<16} failed: {}", r.model_id.name(), r.error.as_deref().unwrap_or("")),
        }
    }
    let fits: Vec<_> = rows.iter().filter_map(|r| r.fit.clone()).collect();
    let overlay = ecdf_overlay(&d, &fits);
    println!("ECDF overlay has {} rows and columns {:?}", overlay.rows.len(), overlay.columns);
    Ok(())
}

#[allow(dead_code)]
fn main() -> mexed::Result<()> {
    run_example()
}
