//! Per-column estimates from delimited text.

use pseudomode::estimator::{self, EstimatorConfig};
use pseudomode::io::{self, ColumnSelector};
use pseudomode::SampleSet;

fn main() -> pseudomode::Result<()> {
    let text = "height;weight\n1.71;68\n1.80;n/a\n1.69;70\n1.75;71\n1.74;70\n1.73;250\n1.72;69\n1.70;70\n1.76;72\n1.74;70\n1.73;71\n";
    let table = io::read_table(text, None)?;
    println!("delimiter {:?}, header {}", table.delimiter as char, table.has_header);
    for column in table.select(&ColumnSelector::All)? {
        let r = estimator::pseudo_mode(&SampleSet::normalize(&column.values)?, &EstimatorConfig::default())?;
        println!(
            "{}: {} values ({} skipped), mean {:.3}, pseudo-mode {:.3}",
            column.name,
            column.values.len(),
            column.skipped,
            estimator::mean(&column.values)?,
            r.location_raw
        );
    }
    Ok(())
}
