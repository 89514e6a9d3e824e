//! Bundled population snapshots: the 2010 Eurostat figures for the EU-27,
//! with Croatia and Iceland as acceding states, and the 2011 status-quo seats.

use crate::model::MemberState;

/// Name, population, status-quo seats.
const EU27: [(&str, u64, u64); 27] = [
    ("Germany", 81_802_257, 99),
    ("France", 64_714_074, 74),
    ("UK", 62_008_048, 73),
    ("Italy", 60_340_328, 73),
    ("Spain", 45_989_016, 54),
    ("Poland", 38_167_329, 51),
    ("Romania", 21_462_186, 33),
    ("Netherlands", 16_574_989, 26),
    ("Greece", 11_305_118, 22),
    ("Belgium", 10_839_905, 22),
    ("Portugal", 10_637_713, 22),
    ("Czech Rep.", 10_506_813, 22),
    ("Hungary", 10_014_324, 22),
    ("Sweden", 9_340_682, 20),
    ("Austria", 8_375_290, 19),
    ("Bulgaria", 7_563_710, 18),
    ("Denmark", 5_534_738, 13),
    ("Slovakia", 5_424_925, 13),
    ("Finland", 5_351_427, 13),
    ("Ireland", 4_467_854, 12),
    ("Lithuania", 3_329_039, 12),
    ("Latvia", 2_248_374, 9),
    ("Slovenia", 2_046_976, 8),
    ("Estonia", 1_340_127, 6),
    ("Cyprus", 803_147, 6),
    ("Luxembourg", 502_066, 6),
    ("Malta", 412_970, 6),
];

pub const CROATIA: (&str, u64) = ("Croatia", 4_425_747);
pub const ICELAND: (&str, u64) = ("Iceland", 317_630);

pub const SNAPSHOT_DATE: &str = "2010-01-01";
pub const SOURCE_LABEL: &str = "Eurostat population on 1 January 2010";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preset {
    pub id: &'static str,
    pub label: &'static str,
    pub states: Vec<MemberState>,
    /// Seats held in 2011; acceding states have none.
    pub status_quo: Vec<(String, u64)>,
}

impl Preset {
    pub fn status_quo_of(&self, name: &str) -> Option<u64> {
        self.status_quo
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, seats)| seats)
    }
}

fn state(name: &str, population: u64) -> MemberState {
    MemberState {
        name: name.to_string(),
        population,
    }
}

fn build(id: &'static str, label: &'static str, acceding: &[(&str, u64)]) -> Preset {
    let mut states: Vec<MemberState> = EU27.iter().map(|&(n, p, _)| state(n, p)).collect();
    for &(name, population) in acceding {
        // keep descending population order
        let at = states
            .iter()
            .position(|s| s.population < population)
            .unwrap_or(states.len());
        states.insert(at, state(name, population));
    }
    Preset {
        id,
        label,
        states,
        status_quo: EU27.iter().map(|&(n, _, s)| (n.to_string(), s)).collect(),
    }
}

pub fn eu27() -> Preset {
    build("eu27", "European Union, 27 States", &[])
}

pub fn eu28() -> Preset {
    build("eu28", "European Union, 27 States + Croatia", &[CROATIA])
}

pub fn eu29() -> Preset {
    build("eu29", "European Union, 27 States + Croatia + Iceland", &[CROATIA, ICELAND])
}

pub fn all() -> Vec<Preset> {
    vec![eu27(), eu28(), eu29()]
}

pub fn by_id(id: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.id == id)
}
