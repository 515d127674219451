//! Seeded 40 / 40 / 20 train / test / validation split.
//!
//! Ids are sorted, shuffled with ChaCha8 seeded from the given integer, then
//! sliced: train and test each take `floor(0.4 · n)`, validation takes the
//! rest.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_IMAGES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub schema: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_by_prefix: Option<String>,
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub validation: Vec<String>,
}

/// Train and test sizes for `n` items.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let forty = n * 2 / 5;
    (forty, forty, n - 2 * forty)
}

fn shuffled<T: Ord + Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut v = items.to_vec();
    v.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    v.shuffle(&mut rng);
    v
}

fn check_input(ids: &[String]) -> Result<()> {
    if ids.len() < MIN_IMAGES {
        return Err(Error::TooFewImages {
            min: MIN_IMAGES,
            got: ids.len(),
        });
    }
    let mut sorted = ids.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Dataset(format!("duplicate image id '{}'", w[0])));
    }
    Ok(())
}

/// Per-image split.
pub fn split(ids: &[String], seed: u64) -> Result<SplitAssignment> {
    check_input(ids)?;
    let order = shuffled(ids, seed);
    let (train, test, _) = split_sizes(order.len());
    let mut out = SplitAssignment {
        schema: 1,
        seed,
        group_by_prefix: None,
        train: order[..train].to_vec(),
        test: order[train..train + test].to_vec(),
        validation: order[train + test..].to_vec(),
    };
    for set in [&mut out.train, &mut out.test, &mut out.validation] {
        set.sort();
    }
    Ok(out)
}

/// Subject-level split: ids sharing the text before the first `delimiter`
/// always land in the same set. Whole groups are dealt to train, then test,
/// until each reaches its 40% quota; the remaining groups go to validation.
pub fn split_grouped(ids: &[String], seed: u64, delimiter: &str) -> Result<SplitAssignment> {
    check_input(ids)?;
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for id in ids {
        let key = id.split(delimiter).next().unwrap_or(id).to_string();
        groups.entry(key).or_default().push(id.clone());
    }
    let keys: Vec<String> = groups.keys().cloned().collect();
    let order = shuffled(&keys, seed);
    let (quota, _, _) = split_sizes(ids.len());
    let mut out = SplitAssignment {
        schema: 1,
        seed,
        group_by_prefix: Some(delimiter.to_string()),
        train: Vec::new(),
        test: Vec::new(),
        validation: Vec::new(),
    };
    for key in order {
        let members = groups.remove(&key).expect("key from map");
        let target = if out.train.len() < quota {
            &mut out.train
        } else if out.test.len() < quota {
            &mut out.test
        } else {
            &mut out.validation
        };
        target.extend(members);
    }
    for set in [&mut out.train, &mut out.test, &mut out.validation] {
        set.sort();
    }
    Ok(out)
}
