//! The choreography handle: seven primitives and the helpers built from
//! them.
//!
//! A choreography is any function `FnOnce(&mut Choreo<'_, L>) -> Result<T,
//! ChoreoError>`. `L` is the local-effect language: each party owns one `L`
//! and local computations receive `&mut L`. Loops and recursion are plain
//! Rust control flow; branching is safe whenever the guard was obtained with
//! [`Choreo::naked`], because then every party in the census holds it.

use alloc::vec::Vec;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{ChoreoError, LocalError};
use crate::interp::{recv, send, Effect, Engine};
use crate::located::{flatten, Faceted, Located, Unwrap, Unwraps, Wrapped};
use crate::locations::{
    explicit_member, in_super, refl, LocationList, Member, Subset, WitnessError,
};

pub type ChoreoResult<T> = Result<T, ChoreoError>;

/// A running choreography over a census.
pub struct Choreo<'r, L> {
    census: LocationList,
    engine: Engine<'r, L>,
}

fn same(left: &LocationList, right: &LocationList) -> Result<(), WitnessError> {
    if left == right {
        Ok(())
    } else {
        Err(WitnessError::ContextMismatch {
            left: left.clone(),
            right: right.clone(),
        })
    }
}

impl<'r, L> Choreo<'r, L> {
    pub(crate) fn new(census: LocationList, engine: Engine<'r, L>) -> Self {
        Choreo { census, engine }
    }

    pub fn census(&self) -> &LocationList {
        &self.census
    }

    /// The census as a subset of itself.
    pub fn all(&self) -> Subset {
        refl(&self.census)
    }

    /// Membership witness for a census member named explicitly.
    pub fn member(&self, name: &str) -> Result<Member, WitnessError> {
        explicit_member(name, &self.census)
    }

    /// Runs `body` at every party of `ls`, collecting a faceted result.
    pub fn parallel<T, F>(&mut self, ls: &Subset, mut body: F) -> ChoreoResult<Faceted<T>>
    where
        F: FnMut(&Member, &Unwrap, &mut L) -> Result<T, LocalError>,
    {
        same(ls.context(), &self.census)?;
        self.engine.record(
            &self.census,
            Effect::Parallel {
                parties: ls.subject().clone(),
            },
        );
        let mut facets = Vec::with_capacity(ls.subject().len());
        for m in ls.members() {
            let party = m.subject().clone();
            if self.engine.acts_for(&party) {
                let un = Unwrap::new(party.clone());
                let out = body(&m, &un, self.engine.local(&party));
                facets.push(Some(out.map_err(|e| self.engine.local_error(&party, e))?));
            } else {
                facets.push(None);
            }
        }
        Ok(Faceted::from_options(ls.subject().clone(), facets))
    }

    /// Computes one value redundantly at every party of `ls`. The body sees
    /// only values located at all of `ls` and must be deterministic.
    pub fn congruently<T, F>(&mut self, ls: &Subset, body: F) -> ChoreoResult<Located<T>>
    where
        F: FnOnce(&Unwraps) -> T,
    {
        same(ls.context(), &self.census)?;
        self.engine.record(
            &self.census,
            Effect::Congruently {
                parties: ls.subject().clone(),
            },
        );
        let owners = ls.subject().clone();
        if self.engine.involves(&owners) {
            let value = body(&Unwraps::new(owners.clone()));
            Ok(Located::new(owners, value))
        } else {
            Ok(Located::absent(owners))
        }
    }

    /// Multicasts the sender's copy (or facet) of a value to `recipients`.
    /// A sender among the recipients keeps its copy without a network
    /// message.
    pub fn comm<T, W>(&mut self, sender: &Member, owned: (&Member, &W), recipients: &Subset) -> ChoreoResult<Located<T>>
    where
        T: Serialize + DeserializeOwned + Clone,
        W: Wrapped<T> + ?Sized,
    {
        let (owner_proof, value) = owned;
        same(sender.context(), &self.census)?;
        same(owner_proof.context(), value.owners())?;
        same(recipients.context(), &self.census)?;
        if owner_proof.subject() != sender.subject() {
            return Err(WitnessError::NotMember {
                name: sender.subject().clone(),
                context: value.owners().clone(),
            }
            .into());
        }
        let from = sender.subject().clone();
        let to = recipients.subject().clone();
        self.engine.record(
            &self.census,
            Effect::Comm {
                sender: from.clone(),
                recipients: to.clone(),
            },
        );
        let read = || {
            value
                .facet(&from)
                .cloned()
                .expect("sender does not hold the value it is sending")
        };
        let result = match &mut self.engine {
            Engine::Central(_) => Some(read()),
            Engine::Projected { target, net } => {
                if *target == from {
                    let payload = read();
                    let peers: Vec<_> = to.iter().filter(|r| **r != from).cloned().collect();
                    if !peers.is_empty() {
                        send(&mut **net, &payload, &peers)?;
                    }
                    to.contains(from.as_str()).then_some(payload)
                } else if to.contains(target.as_str()) {
                    Some(recv(&mut **net, &from)?)
                } else {
                    None
                }
            }
        };
        Ok(Located::from_option(to, result))
    }

    /// Runs a choreography over a sub-census. Parties outside `sub` skip it.
    pub fn enclave<T, F>(&mut self, sub: &Subset, inner: F) -> ChoreoResult<Located<T>>
    where
        F: FnOnce(&mut Choreo<'_, L>) -> ChoreoResult<T>,
    {
        same(sub.context(), &self.census)?;
        self.engine.record(
            &self.census,
            Effect::Enclave {
                census: sub.subject().clone(),
            },
        );
        let owners = sub.subject().clone();
        if self.engine.involves(&owners) {
            let mut child = Choreo::new(owners.clone(), self.engine.reborrow());
            let value = inner(&mut child)?;
            Ok(Located::new(owners, value))
        } else {
            Ok(Located::absent(owners))
        }
    }

    /// Unwraps a value every census member holds.
    pub fn naked<T>(&mut self, proof: &Subset, v: Located<T>) -> ChoreoResult<T> {
        same(proof.subject(), &self.census)?;
        same(proof.context(), v.owners())?;
        self.engine.record(
            &self.census,
            Effect::Naked {
                owners: v.owners().clone(),
            },
        );
        Ok(v
            .into_option()
            .expect("census member does not hold a value located at the whole census"))
    }

    /// Runs `body` once per party of `qs`, in order; each iteration's result
    /// is owned by that party alone and becomes its facet.
    pub fn fan_out<T, W, F>(&mut self, qs: &Subset, mut body: F) -> ChoreoResult<Faceted<T>>
    where
        W: Wrapped<T>,
        F: FnMut(&mut Self, &Member) -> ChoreoResult<W>,
    {
        same(qs.context(), &self.census)?;
        self.engine.record(
            &self.census,
            Effect::FanOut {
                parties: qs.subject().clone(),
            },
        );
        let mut facets = Vec::with_capacity(qs.subject().len());
        for q in qs.members() {
            let w = body(self, &q)?;
            let owners = w.owners();
            if owners.len() != 1 || owners.get(0) != Some(q.subject()) {
                return Err(WitnessError::ContextMismatch {
                    left: q.alone().subject().clone(),
                    right: owners.clone(),
                }
                .into());
            }
            facets.push(w.into_facet(q.subject()));
        }
        Ok(Faceted::from_options(qs.subject().clone(), facets))
    }

    /// Runs `body` once per party of `qs`, in order; every iteration's
    /// result is located at the same recipients `rs`, and the results are
    /// gathered there as a list in `qs` order.
    pub fn fan_in<T, F>(&mut self, qs: &Subset, rs: &Subset, mut body: F) -> ChoreoResult<Located<Vec<T>>>
    where
        F: FnMut(&mut Self, &Member) -> ChoreoResult<Located<T>>,
    {
        same(qs.context(), &self.census)?;
        same(rs.context(), &self.census)?;
        self.engine.record(
            &self.census,
            Effect::FanIn {
                parties: qs.subject().clone(),
                recipients: rs.subject().clone(),
            },
        );
        let mut values = Vec::with_capacity(qs.subject().len());
        for q in qs.members() {
            let v = body(self, &q)?;
            same(rs.subject(), v.owners())?;
            if let Some(x) = v.into_option() {
                values.push(x);
            }
        }
        let owners = rs.subject().clone();
        if self.engine.involves(&owners) {
            debug_assert_eq!(values.len(), qs.subject().len());
            Ok(Located::new(owners, values))
        } else {
            Ok(Located::absent(owners))
        }
    }

    // Helpers. Each is an expansion into the primitives above.

    /// `~>`: sends a message in any of the [`Message`] shapes.
    pub fn send_to<'w, T, M>(&mut self, msg: M, recipients: &Subset) -> ChoreoResult<Located<T>>
    where
        T: Serialize + DeserializeOwned + Clone + 'w,
        M: Message<'w, T>,
    {
        let (sender, owner_proof, value) = msg.resolve(&self.census)?;
        self.comm(&sender, (&owner_proof, value), recipients)
    }

    /// `~~>`: computes a value at the sender and sends it straight on.
    pub fn locally_then_send<T, F>(&mut self, sender: &Member, body: F, recipients: &Subset) -> ChoreoResult<Located<T>>
    where
        T: Serialize + DeserializeOwned + Clone,
        F: FnOnce(&Unwrap, &mut L) -> Result<T, LocalError>,
    {
        let v = self.locally(sender, body)?;
        self.send_to((sender, &v), recipients)
    }

    /// `-~>`: runs local code at the sender and sends its result.
    pub fn run_then_send<T, F>(&mut self, sender: &Member, body: F, recipients: &Subset) -> ChoreoResult<Located<T>>
    where
        T: Serialize + DeserializeOwned + Clone,
        F: FnOnce(&mut L) -> Result<T, LocalError>,
    {
        self.locally_then_send(sender, |_, io| body(io), recipients)
    }

    /// Sends to the whole census and unwraps the result.
    pub fn broadcast<'w, T, M>(&mut self, msg: M) -> ChoreoResult<T>
    where
        T: Serialize + DeserializeOwned + Clone + 'w,
        M: Message<'w, T>,
    {
        let everyone = self.all();
        let v = self.send_to(msg, &everyone)?;
        self.naked(&everyone, v)
    }

    /// Local computation at a single party.
    pub fn locally<T, F>(&mut self, m: &Member, body: F) -> ChoreoResult<Located<T>>
    where
        F: FnOnce(&Unwrap, &mut L) -> Result<T, LocalError>,
    {
        let mut body = Some(body);
        let f = self.parallel(&m.alone(), |_, un, io| {
            (body.take().expect("single party runs once"))(un, io)
        })?;
        let owners = f.owners().clone();
        let party = m.subject().clone();
        Ok(Located::from_option(owners, f.into_facet(&party)))
    }

    /// [`Choreo::locally`] discarding the result.
    pub fn locally_unit<F>(&mut self, m: &Member, body: F) -> ChoreoResult<()>
    where
        F: FnOnce(&Unwrap, &mut L) -> Result<(), LocalError>,
    {
        self.locally(m, body).map(|_| ())
    }

    /// [`Choreo::locally`] for code that needs neither identity nor unwrapping.
    pub fn locally_plain<T, F>(&mut self, m: &Member, body: F) -> ChoreoResult<Located<T>>
    where
        F: FnOnce(&mut L) -> Result<T, LocalError>,
    {
        self.locally(m, |_, io| body(io))
    }

    pub fn locally_plain_unit<F>(&mut self, m: &Member, body: F) -> ChoreoResult<()>
    where
        F: FnOnce(&mut L) -> Result<(), LocalError>,
    {
        self.locally(m, |_, io| body(io)).map(|_| ())
    }

    /// [`Choreo::parallel`] discarding the results.
    pub fn parallel_unit<F>(&mut self, ls: &Subset, body: F) -> ChoreoResult<()>
    where
        F: FnMut(&Member, &Unwrap, &mut L) -> Result<(), LocalError>,
    {
        self.parallel(ls, body).map(|_| ())
    }

    /// [`Choreo::parallel`] for code that ignores who runs it.
    pub fn parallel_plain<T, F>(&mut self, ls: &Subset, mut body: F) -> ChoreoResult<Faceted<T>>
    where
        F: FnMut(&mut L) -> Result<T, LocalError>,
    {
        self.parallel(ls, |_, _, io| body(io))
    }

    /// Branches inside an enclave of the parties that already know the guard.
    pub fn cond<A, B, F>(&mut self, ls: &Subset, guard: (&Subset, Located<A>), body: F) -> ChoreoResult<Located<B>>
    where
        F: FnOnce(&mut Choreo<'_, L>, A) -> ChoreoResult<B>,
    {
        let (known, value) = guard;
        self.enclave(ls, |inner| {
            let a = inner.naked(known, value)?;
            body(inner, a)
        })
    }

    /// Enclave whose result is located at `rs` within the enclave, without
    /// double wrapping.
    pub fn enclave_to<T, F>(&mut self, ls: &Subset, rs: &Subset, inner: F) -> ChoreoResult<Located<T>>
    where
        F: FnOnce(&mut Choreo<'_, L>) -> ChoreoResult<Located<T>>,
    {
        let nested = self.enclave(ls, inner)?;
        Ok(flatten(rs, &refl(rs.subject()), nested)?)
    }

    pub fn enclave_to_all<T, F>(&mut self, ls: &Subset, inner: F) -> ChoreoResult<Located<T>>
    where
        F: FnOnce(&mut Choreo<'_, L>) -> ChoreoResult<Located<T>>,
    {
        self.enclave_to(ls, &refl(ls.subject()), inner)
    }
}

/// The shapes a message argument to [`Choreo::send_to`] and
/// [`Choreo::broadcast`] can take:
///
/// * `(&sender_in_census, &value)` when the sender is listed among the
///   value's owners;
/// * `(&sender_in_owners, &owners_in_census, &value)`;
/// * `(&sender_in_census, (&sender_in_owners, &value))`.
pub trait Message<'w, T> {
    /// Sender as a census member, sender as an owner, and the value.
    fn resolve(self, census: &LocationList) -> Result<(Member, Member, &'w dyn Wrapped<T>), WitnessError>;
}

impl<'w, T, W> Message<'w, T> for (&Member, &'w W)
where
    W: Wrapped<T>,
{
    fn resolve(self, census: &LocationList) -> Result<(Member, Member, &'w dyn Wrapped<T>), WitnessError> {
        let (sender, value) = self;
        same(sender.context(), census)?;
        let owner = explicit_member(sender.subject().as_str(), value.owners())?;
        Ok((sender.clone(), owner, value))
    }
}

impl<'w, T, W> Message<'w, T> for (&Member, &Subset, &'w W)
where
    W: Wrapped<T>,
{
    fn resolve(self, census: &LocationList) -> Result<(Member, Member, &'w dyn Wrapped<T>), WitnessError> {
        let (owner, owners, value) = self;
        same(owners.context(), census)?;
        let sender = in_super(owners, owner)?;
        Ok((sender, owner.clone(), value))
    }
}

impl<'w, T, W> Message<'w, T> for (&Member, (&Member, &'w W))
where
    W: Wrapped<T>,
{
    fn resolve(self, census: &LocationList) -> Result<(Member, Member, &'w dyn Wrapped<T>), WitnessError> {
        let (sender, (owner, value)) = self;
        same(sender.context(), census)?;
        Ok((sender.clone(), owner.clone(), value))
    }
}
