//! A federated lottery: servers jointly pick one client at random and
//! forward their shares of that client's secret to an analyst.
//!
//! The pick is the sum of one random number per server, committed to with
//! salted hashes before any of them is opened, so no server can choose its
//! number after seeing the others'.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::cli::{input, Cli, ParseInput};
use super::sharing::lookup;
use crate::choreo::{Choreo, ChoreoResult};
use crate::error::LocalError;
use crate::located::Located;
use crate::locations::{in_super, listed_second, refl, singleton, LocationId, Member, Subset};

/// An element of the prime field of size 999983.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fp(u32);

impl Fp {
    pub const P: u32 = 999_983;

    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(i64::from(Self::P)) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn random(rng: &mut dyn RngCore) -> Self {
        Fp(rng.random_range(0..Self::P))
    }

    pub fn pow(self, mut e: u64) -> Self {
        let (mut base, mut acc) = (self, Fp(1));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        (self.0 != 0).then(|| self.pow(u64::from(Self::P - 2)))
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        Fp(((u64::from(self.0) + u64::from(rhs.0)) % u64::from(Self::P)) as u32)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp((Self::P - self.0) % Self::P)
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + -rhs
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        Fp(((u64::from(self.0) * u64::from(rhs.0)) % u64::from(Self::P)) as u32)
    }
}

impl Sum for Fp {
    fn sum<I: Iterator<Item = Fp>>(iter: I) -> Fp {
        iter.fold(Fp(0), Add::add)
    }
}

impl<'a> Sum<&'a Fp> for Fp {
    fn sum<I: Iterator<Item = &'a Fp>>(iter: I) -> Fp {
        iter.copied().sum()
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl ParseInput for Fp {
    fn parse_input(line: &str) -> Option<Self> {
        line.trim().parse::<i64>().ok().map(Fp::new)
    }
}

/// Splits `secret` into one share per name: the later shares are random
/// and the first makes the total come out right.
pub fn fp_shares(names: &[LocationId], secret: Fp, rng: &mut dyn RngCore) -> Vec<(LocationId, Fp)> {
    let free: Vec<Fp> = (1..names.len()).map(|_| Fp::random(rng)).collect();
    let first = secret - free.iter().sum::<Fp>();
    names
        .iter()
        .cloned()
        .zip(core::iter::once(first).chain(free))
        .collect()
}

/// Hex SHA-256 of `ρ` then `ψ`, each as 8 big-endian bytes.
pub fn commitment(rho: i64, psi: i64) -> String {
    let mut h = Sha256::new();
    h.update(rho.to_be_bytes());
    h.update(psi.to_be_bytes());
    hex::encode(h.finalize())
}

pub const SALT_MIN: i64 = 1 << 18;
pub const SALT_MAX: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LotteryConfig {
    /// Each server's random number is drawn from `1..=tau_multiple * #clients`.
    pub tau_multiple: u64,
    /// A server that opens `ρ + 1` instead of the `ρ` it committed to.
    pub tamper: Option<LocationId>,
}

impl Default for LotteryConfig {
    fn default() -> Self {
        LotteryConfig {
            tau_multiple: 4,
            tamper: None,
        }
    }
}

/// Runs the lottery and returns the revealed value, located at the analyst,
/// who also prints it. Needs at least two clients and two servers.
pub fn lottery<L: Cli>(
    ch: &mut Choreo<'_, L>,
    clients: &Subset,
    servers: &Subset,
    analyst: &Member,
    config: &LotteryConfig,
) -> ChoreoResult<Located<Fp>> {
    listed_second(clients.subject())?;
    listed_second(servers.subject())?;
    let server_names = servers.subject().as_slice().to_vec();
    let n_clients = clients.subject().len();
    let tau = config.tau_multiple.max(1) as i64 * n_clients as i64;

    let secret = ch.parallel_plain(clients, |io| input::<Fp>(io, "secret:"))?;
    let client_shares = ch.parallel(clients, |client, un, io| {
        Ok(fp_shares(&server_names, *un.get(client, &secret), io.rng()))
    })?;
    let server_shares = ch.fan_out(servers, |ch, server| {
        let to_server = in_super(servers, server)?.alone();
        ch.fan_in(clients, &to_server, |ch, client| {
            let from = in_super(clients, client)?;
            let share = ch.locally(&from, |un, _| Ok(lookup(un.get(client, &client_shares), server.subject())))?;
            ch.send_to((&from, &share), &to_server)
        })
    })?;

    // 1) every server picks a number, and a salt
    let rho = ch.parallel_plain(servers, |io| Ok(io.rng().random_range(1..=tau)))?;
    let psi = ch.parallel_plain(servers, |io| Ok(io.rng().random_range(SALT_MIN..=SALT_MAX)))?;
    // 2) commit to it
    let alpha = ch.parallel(servers, |server, un, _| Ok(commitment(*un.get(server, &rho), *un.get(server, &psi))))?;
    let alpha_all = ch.fan_in(servers, servers, |ch, server| ch.send_to((server, servers, &alpha), servers))?;
    // 3) only then open
    let opened = match &config.tamper {
        None => rho,
        Some(cheat) => ch.parallel(servers, |server, un, _| {
            Ok(*un.get(server, &rho) + i64::from(server.subject() == cheat))
        })?,
    };
    let psi_all = ch.fan_in(servers, servers, |ch, server| ch.send_to((server, servers, &psi), servers))?;
    let rho_all = ch.fan_in(servers, servers, |ch, server| ch.send_to((server, servers, &opened), servers))?;
    // 4) check every commitment
    ch.parallel_unit(servers, |server, un, _| {
        let alphas = un.get(server, &alpha_all);
        let rhos = un.get(server, &rho_all);
        let psis = un.get(server, &psi_all);
        let ok = alphas
            .iter()
            .zip(rhos.iter().zip(psis))
            .all(|(a, (r, p))| *a == commitment(*r, *p));
        if ok {
            Ok(())
        } else {
            Err(LocalError::CommitmentCheckFailed)
        }
    })?;
    // 5) the winning index
    let all_servers = refl(servers.subject());
    let omega = ch.congruently(servers, |un| {
        let total: i64 = un.get(&all_servers, &rho_all).iter().sum();
        total.rem_euclid(n_clients as i64) as usize
    })?;
    let chosen = ch.parallel(servers, |server, un, _| {
        Ok(un.get(server, &server_shares)[*un.get(server, &omega)])
    })?;
    let to_analyst = analyst.alone();
    let all_shares = ch.fan_in(servers, &to_analyst, |ch, server| {
        ch.send_to((server, servers, &chosen), &to_analyst)
    })?;
    ch.locally(analyst, |un, io| {
        let answer: Fp = un.get(&singleton(analyst.subject()), &all_shares).iter().sum();
        io.put_output("The answer is:", &alloc::format!("{answer}"));
        Ok(answer)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::cli::party_rng;

    #[test]
    fn field_spot_checks() {
        let a = Fp::new(123_456);
        let b = Fp::new(-7);
        let c = Fp::new(999_999);
        assert_eq!(b.value(), 999_976);
        assert_eq!(c.value(), 16);
        assert_eq!((a + b) + c, a + (b + c));
        assert_eq!((a * b) * c, a * (b * c));
        assert_eq!(a * (b + c), a * b + a * c);
        assert_eq!(a - a, Fp::new(0));
        assert_eq!(a + -a, Fp::new(0));
        assert_eq!(a * a.inverse().unwrap(), Fp::new(1));
        assert_eq!(Fp::new(0).inverse(), None);
    }

    #[test]
    fn shares_sum_to_secret() {
        let names: Vec<LocationId> = ["s1", "s2", "s3"]
            .iter()
            .map(|n| LocationId::new(*n).unwrap())
            .collect();
        let mut rng = party_rng(5, "c");
        for v in [0, 1, 999_982, 31_337] {
            let shares = fp_shares(&names, Fp::new(v), &mut rng);
            assert_eq!(shares.iter().map(|(_, s)| *s).sum::<Fp>(), Fp::new(v));
        }
    }

    #[test]
    fn commitment_binds_both_values() {
        let a = commitment(3, SALT_MIN);
        assert_eq!(a.len(), 64);
        assert_eq!(a, commitment(3, SALT_MIN));
        assert_ne!(a, commitment(4, SALT_MIN));
        assert_ne!(a, commitment(3, SALT_MIN + 1));
        assert_ne!(commitment(1, 2), commitment(2, 1));
    }
}
