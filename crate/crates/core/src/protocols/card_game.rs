//! A black-jack-style game between a dealer and any number of players.
//!
//! The dealer deals every player one card face up, each player may ask for
//! a second card, and the dealer then reveals one card shared by everyone.
//! A player wins when the sum of their cards, modulo 21, exceeds 19.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::iter::Sum;
use core::ops::Add;

use serde::{Deserialize, Serialize};

use super::cli::{input, Cli, ParseInput};
use crate::choreo::{Choreo, ChoreoResult};
use crate::locations::{
    all_of, cons, cons_super, in_super, listed_first, listed_second, nobody, singleton, LocationList,
};

/// A card value; arithmetic wraps modulo 21.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Card(u8);

impl Card {
    pub const MODULUS: u8 = 21;

    pub fn new(value: i64) -> Self {
        Card(value.rem_euclid(i64::from(Self::MODULUS)) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl Add for Card {
    type Output = Card;

    fn add(self, rhs: Card) -> Card {
        Card((self.0 + rhs.0) % Self::MODULUS)
    }
}

impl Sum for Card {
    fn sum<I: Iterator<Item = Card>>(iter: I) -> Card {
        iter.fold(Card(0), Add::add)
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl ParseInput for Card {
    fn parse_input(line: &str) -> Option<Self> {
        line.trim().parse::<i64>().ok().map(Card::new)
    }
}

/// The win predicate: the hand's sum exceeds card 19.
pub fn wins(hand: &[Card]) -> bool {
    hand.iter().copied().sum::<Card>() > Card::new(19)
}

fn show_hand(hand: &[Card]) -> String {
    let cards: Vec<String> = hand.iter().map(|c| format!("{c}")).collect();
    format!("[{}]", cards.join(","))
}

/// The game. The first census member deals; everyone after it plays.
pub fn card_game<L: Cli>(ch: &mut Choreo<'_, L>) -> ChoreoResult<()> {
    let census = ch.census().clone();
    let dealer = listed_first(&census)?;
    let player_list = LocationList::from_ids(census.as_slice()[1..].to_vec())?;
    let players = cons_super(&all_of(&player_list), dealer.subject())?;

    let hand1 = ch.fan_out(&players, |ch, player| {
        let card1 = ch.locally_plain(&dealer, |io| {
            input::<Card>(io, &format!("Enter random card for {}", player.subject()))
        })?;
        let to = cons(&in_super(&players, player)?, &nobody(&census))?;
        ch.send_to((&dealer, &card1), &to)
    })?;

    let on_the_table = ch.fan_in(&players, &players, |ch, player| {
        ch.send_to((player, &players, &hand1), &players)
    })?;

    let wants_next_card = ch.parallel(&players, |player, un, io| {
        io.put_note(&format!("My first card is: {}", un.get(player, &hand1)));
        io.put_note(&format!("Cards on the table: {}", show_hand(un.get(player, &on_the_table))));
        input::<bool>(io, "I'll ask for another? [True/False]")
    })?;

    let hand2 = ch.fan_out(&players, |ch, player| {
        let pair = cons(&dealer, &cons(&in_super(&players, player)?, &nobody(&census))?)?;
        let holder = listed_second(pair.subject())?.alone();
        ch.enclave_to(&pair, &holder, |inner| {
            let dealer = listed_first(inner.census())?;
            let me = listed_second(inner.census())?;
            let choice: bool = inner.broadcast((&me, (player, &wants_next_card)))?;
            if choice {
                let cd2 = inner.locally_plain(&dealer, |io| {
                    input::<Card>(io, &format!("{}'s second card:", player.subject()))
                })?;
                let card2 = inner.send_to((&dealer, &cd2), &me.alone())?;
                inner.locally(&me, |un, _| {
                    Ok(vec![*un.get(player, &hand1), *un.get(&singleton(me.subject()), &card2)])
                })
            } else {
                inner.locally(&me, |un, _| Ok(vec![*un.get(player, &hand1)]))
            }
        })
    })?;

    let tbl_crd = ch.locally_plain(&dealer, |io| input::<Card>(io, "Enter a single card for everyone:"))?;
    let table_card = ch.send_to((&dealer, &tbl_crd), &players)?;
    ch.parallel_unit(&players, |player, un, io| {
        let mut hand = vec![*un.get(player, &table_card)];
        hand.extend_from_slice(un.get(player, &hand2));
        io.put_note(&format!("My hand: {}", show_hand(&hand)));
        io.put_output("My win result:", if wins(&hand) { "True" } else { "False" });
        Ok(())
    })
}
