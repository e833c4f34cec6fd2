//! The six ready-to-play characters: three specialists and three jacks of
//! all trades. Source files live in `data/characters/`.

use crate::character::{Character, CharacterFile};

pub const WOLF_OF_WALLSTREET: &str = include_str!("../data/characters/wolf_of_wallstreet.json");
pub const NERD: &str = include_str!("../data/characters/nerd.json");
pub const THIEF: &str = include_str!("../data/characters/thief.json");
pub const SPOCK: &str = include_str!("../data/characters/spock.json");
pub const CON_ARTIST: &str = include_str!("../data/characters/con_artist.json");
pub const CRAFTSMAN: &str = include_str!("../data/characters/craftsman.json");

pub const SPECIALISTS: [&str; 3] = [WOLF_OF_WALLSTREET, NERD, THIEF];
pub const JACKS_OF_ALL_TRADES: [&str; 3] = [SPOCK, CON_ARTIST, CRAFTSMAN];

pub fn files() -> Vec<CharacterFile> {
    SPECIALISTS
        .iter()
        .chain(JACKS_OF_ALL_TRADES.iter())
        .map(|text| CharacterFile::from_json(text).expect("shipped character file parses"))
        .collect()
}

/// All six predefined characters, validated.
pub fn all() -> Vec<Character> {
    files()
        .iter()
        .map(|f| f.validate().expect("shipped character is valid"))
        .collect()
}

pub fn by_name(name: &str) -> Option<Character> {
    all().into_iter().find(|c| c.name().eq_ignore_ascii_case(name))
}
