//! A value passed around inside an enclave and then out of it.
//!
//! `bob` makes a number and sends it to `alice`, who broadcasts it within
//! the clique only. Afterwards `bob` forwards its copy to `carroll`, who may
//! sit outside the clique.

use crate::choreo::{Choreo, ChoreoResult};
use crate::located::Located;
use crate::locations::{explicit_member, LocationId, Member, Subset};

/// Runs the exchange and returns the number, located at `carroll` alone.
/// `alice` and `bob` must both belong to `clique`.
pub fn example_chor<L>(
    ch: &mut Choreo<'_, L>,
    clique: &Subset,
    alice: &LocationId,
    bob: &LocationId,
    carroll: &Member,
    bob_foo: i64,
) -> ChoreoResult<Located<i64>> {
    let their_foo = ch.enclave(clique, |inner| {
        let alice = explicit_member(alice.as_str(), inner.census())?;
        let bob = explicit_member(bob.as_str(), inner.census())?;
        let bob_foo = inner.locally(&bob, |_, _| Ok(bob_foo))?;
        let alice_foo = inner.send_to((&bob, &bob_foo), &alice.alone())?;
        // the broadcast reaches the enclave's census, not the outer one
        inner.broadcast((&alice, &alice_foo))
    })?;
    let bob = ch.member(bob.as_str())?;
    ch.send_to((&bob, &their_foo), &carroll.alone())
}
