//! Boolean additive secret sharing: shares xor to the secret.

use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::cli::Cli;
use crate::choreo::{Choreo, ChoreoResult};
use crate::located::{Faceted, Located};
use crate::locations::{singleton, LocationId, Member};

/// One share per name. The shares after the first are uniformly random and
/// the first makes the xor of all of them equal `x`.
pub fn gen_shares(names: &[LocationId], x: bool, rng: &mut dyn RngCore) -> Vec<(LocationId, bool)> {
    let free: Vec<bool> = (1..names.len()).map(|_| rng.random()).collect();
    let first = free.iter().fold(x, |acc, s| acc ^ s);
    names
        .iter()
        .cloned()
        .zip(core::iter::once(first).chain(free))
        .collect()
}

/// `p` splits its secret and sends share `i` to census member `i`, itself
/// included.
pub fn secret_share<L: Cli>(ch: &mut Choreo<'_, L>, p: &Member, value: &Located<bool>) -> ChoreoResult<Faceted<bool>> {
    let names = ch.census().as_slice().to_vec();
    let shares = ch.locally(p, |un, io| {
        Ok(gen_shares(&names, *un.get(&singleton(p.subject()), value), io.rng()))
    })?;
    let all = ch.all();
    ch.fan_out(&all, |ch, q| {
        ch.locally_then_send(
            p,
            |un, _| Ok(lookup(un.get(&singleton(p.subject()), &shares), q.subject())),
            &q.alone(),
        )
    })
}

/// Everyone sends their share to everyone, then each xors the lot.
pub fn reveal<L>(ch: &mut Choreo<'_, L>, shares: &Faceted<bool>) -> ChoreoResult<bool> {
    let all = ch.all();
    let gathered = ch.fan_in(&all, &all, |ch, p| ch.send_to((p, (p, shares)), &all))?;
    let gathered = ch.naked(&all, gathered)?;
    Ok(gathered.into_iter().fold(false, |a, b| a ^ b))
}

pub(crate) fn lookup<T: Copy>(pairs: &[(LocationId, T)], who: &LocationId) -> T {
    pairs
        .iter()
        .find(|(name, _)| name == who)
        .map(|(_, v)| *v)
        .expect("every census member has an entry")
}
