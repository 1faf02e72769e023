//! The two worked examples shipped with the crate, as JSON.

use crate::comb::Comb;
use crate::error::Result;
use crate::graph::{BipartiteInstance, FractionalPoint};
use crate::io::{load_instance, CombFile};

pub const TABLE1_INSTANCE: &str = include_str!("../data/table1.json");
pub const TABLE1_COMB: &str = include_str!("../data/table1_comb.json");
pub const TABLE2_CORRECTED: &str = include_str!("../data/table2_corrected.json");
pub const TABLE2_AS_PRINTED: &str = include_str!("../data/table2_as_printed.json");
pub const TABLE2_COMB: &str = include_str!("../data/table2_comb.json");

/// Table 2 was published with an edge weight missing; `Corrected` adds
/// `b-e = 1`, which is what the stated left-hand side requires.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Table2Variant {
    #[default]
    Corrected,
    AsPrinted,
}

impl std::str::FromStr for Table2Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "corrected" => Ok(Table2Variant::Corrected),
            "as-printed" => Ok(Table2Variant::AsPrinted),
            _ => Err(format!("unknown table 2 variant `{s}` (expected corrected or as-printed)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Example {
    pub instance: BipartiteInstance,
    pub point: FractionalPoint,
    pub comb: Comb,
}

fn load(instance: &str, comb: &str) -> Result<Example> {
    let (instance, point) = load_instance(instance)?;
    let comb = CombFile::parse(comb)?.build(&instance)?;
    Ok(Example { instance, point, comb })
}

pub fn table1() -> Example {
    load(TABLE1_INSTANCE, TABLE1_COMB).expect("bundled data parses")
}

pub fn table2(variant: Table2Variant) -> Example {
    let text = match variant {
        Table2Variant::Corrected => TABLE2_CORRECTED,
        Table2Variant::AsPrinted => TABLE2_AS_PRINTED,
    };
    load(text, TABLE2_COMB).expect("bundled data parses")
}
