//! GMW evaluation of boolean circuits over xor-shared wires, with AND gates
//! computed from pairwise oblivious transfers.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::Rng;

use super::cli::{input, Cli};
use super::ot::{ot2, PkeScheme};
use super::sharing::{lookup, secret_share};
use crate::choreo::{Choreo, ChoreoResult};
use crate::located::{localize, Faceted};
use crate::locations::{cons, listed_second, nobody, singleton, LocationId, Member};

/// A boolean circuit over the census. Input wires name the party whose
/// secret feeds them; each occurrence reads a fresh input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Circuit {
    InputWire(Member),
    LitWire(bool),
    AndGate(Box<Circuit>, Box<Circuit>),
    XorGate(Box<Circuit>, Box<Circuit>),
}

impl Circuit {
    pub fn and(l: Circuit, r: Circuit) -> Self {
        Circuit::AndGate(Box::new(l), Box::new(r))
    }

    pub fn xor(l: Circuit, r: Circuit) -> Self {
        Circuit::XorGate(Box::new(l), Box::new(r))
    }
}

/// Shares of `u ∧ v` from shares of `u` and `v`.
///
/// Party `i` picks a random mask `a_ij` for every other party `j` and offers
/// `(u_i ⊕ a_ij, a_ij)` in an OT where `j` selects with `v_j`, so `j`
/// receives `(u_i ∧ v_j) ⊕ a_ij`. Xoring what each party received, its own
/// masks and its local `u_i ∧ v_i` gives a share of the product.
pub fn f_and<L: Cli, S: PkeScheme>(
    ch: &mut Choreo<'_, L>,
    scheme: &S,
    u_shares: &Faceted<bool>,
    v_shares: &Faceted<bool>,
) -> ChoreoResult<Faceted<bool>> {
    let census = ch.census().clone();
    let all = ch.all();
    let names = census.as_slice().to_vec();
    let a_j_s: Faceted<Vec<(LocationId, bool)>> = ch.parallel_plain(&all, |io| {
        Ok(names.iter().map(|n| (n.clone(), io.rng().random())).collect())
    })?;

    let bs = ch.fan_out(&all, |ch, p_j| {
        let b_i_s = ch.fan_in(&all, &p_j.alone(), |ch, p_i| {
            if p_i.subject() == p_j.subject() {
                ch.locally(p_j, |_, _| Ok(false))
            } else {
                let bb = ch.locally(p_i, |un, _| {
                    let a_ij = lookup(un.get(p_i, &a_j_s), p_j.subject());
                    Ok((*un.get(p_i, u_shares) ^ a_ij, a_ij))
                })?;
                let pair = cons(p_i, &cons(p_j, &nobody(&census))?)?;
                let receiver = listed_second(pair.subject())?.alone();
                let v_j = localize(p_j, v_shares)?;
                ch.enclave_to(&pair, &receiver, |ot| ot2(ot, scheme, &bb, &v_j))
            }
        })?;
        ch.locally(p_j, |un, _| {
            Ok(un
                .get(&singleton(p_j.subject()), &b_i_s)
                .iter()
                .fold(false, |a, b| a ^ b))
        })
    })?;

    ch.parallel(&all, |p_i, un, _| {
        let me = p_i.subject();
        let masks = un
            .get(p_i, &a_j_s)
            .iter()
            .filter(|(p_j, _)| p_j != me)
            .fold(false, |acc, (_, a)| acc ^ a);
        Ok((*un.get(p_i, u_shares) && *un.get(p_i, v_shares)) ^ *un.get(p_i, &bs) ^ masks)
    })
}

/// Evaluates `circuit`, returning every party's share of the output.
pub fn gmw<L: Cli, S: PkeScheme>(ch: &mut Choreo<'_, L>, scheme: &S, circuit: &Circuit) -> ChoreoResult<Faceted<bool>> {
    let all = ch.all();
    match circuit {
        Circuit::InputWire(p) => {
            let value = ch.locally_plain(p, |io| input::<bool>(io, "Enter a secret input value:"))?;
            secret_share(ch, p, &value)
        }
        Circuit::LitWire(b) => ch.fan_out(&all, |ch, p| {
            let share = p.index() == 0 && *b;
            ch.locally(p, |_, _| Ok(share))
        }),
        Circuit::AndGate(l, r) => {
            let l = gmw(ch, scheme, l)?;
            let r = gmw(ch, scheme, r)?;
            f_and(ch, scheme, &l, &r)
        }
        Circuit::XorGate(l, r) => {
            let l = gmw(ch, scheme, l)?;
            let r = gmw(ch, scheme, r)?;
            ch.parallel(&all, |p, un, _| Ok(*un.get(p, &l) ^ *un.get(p, &r)))
        }
    }
}
