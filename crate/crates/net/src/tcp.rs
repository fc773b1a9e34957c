//! One process per party, talking over TCP.
//!
//! Every message is one frame: a 4-byte big-endian length and that many
//! bytes of UTF-8. A party opens at most one connection to each peer, on
//! first use, and the first frame it sends on it is its own name. Incoming
//! connections are read by background threads into per-sender queues.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{self, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use census_core::{Backend, LocationId, TransportError};

use crate::config::{ConfigError, NetworkConfig};

/// Frames larger than this are refused.
pub const MAX_FRAME: u32 = 64 << 20;

pub fn write_frame(w: &mut impl Write, payload: &str) -> io::Result<()> {
    let len = u32::try_from(payload.len())
        .ok()
        .filter(|n| *n <= MAX_FRAME)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "frame too large"))?;
    let mut buf = Vec::with_capacity(4 + payload.len());
    buf.extend_from_slice(&len.to_be_bytes());
    buf.extend_from_slice(payload.as_bytes());
    w.write_all(&buf)
}

/// The next frame, or `None` if the stream ended cleanly between frames.
pub fn read_frame(r: &mut impl Read) -> io::Result<Option<String>> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let len = u32::from_be_bytes(len);
    if len > MAX_FRAME {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "frame too large"));
    }
    let mut buf = vec![0u8; len as usize];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf)
        .map(Some)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

#[derive(Default)]
struct Inbox {
    state: Mutex<InboxState>,
    arrived: Condvar,
}

#[derive(Default)]
struct InboxState {
    queues: HashMap<LocationId, VecDeque<String>>,
    closed: HashSet<LocationId>,
}

impl Inbox {
    fn push(&self, from: &LocationId, msg: String) {
        let mut s = self.state.lock().unwrap_or_else(|e| e.into_inner());
        s.closed.remove(from);
        s.queues.entry(from.clone()).or_default().push_back(msg);
        drop(s);
        self.arrived.notify_all();
    }

    fn close(&self, from: &LocationId) {
        let mut s = self.state.lock().unwrap_or_else(|e| e.into_inner());
        s.closed.insert(from.clone());
        drop(s);
        self.arrived.notify_all();
    }
}

/// The backend for a single party `me`.
pub struct TcpBackend {
    me: LocationId,
    config: NetworkConfig,
    local_addr: SocketAddr,
    inbox: Arc<Inbox>,
    outgoing: Mutex<HashMap<LocationId, TcpStream>>,
    shutdown: Arc<AtomicBool>,
}

#[derive(Debug, thiserror::Error)]
pub enum StartError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: io::Error },
}

impl TcpBackend {
    /// Listens on `me`'s configured address.
    pub fn bind(me: LocationId, config: NetworkConfig) -> Result<Self, StartError> {
        let addr = config.address(&me)?.to_string();
        let listener = TcpListener::bind(&addr).map_err(|source| StartError::Bind { addr, source })?;
        Self::from_listener(me, listener, config)
    }

    /// Uses an already bound listener, e.g. one on an ephemeral port.
    pub fn from_listener(me: LocationId, listener: TcpListener, config: NetworkConfig) -> Result<Self, StartError> {
        config.address(&me)?;
        let local_addr = listener.local_addr().map_err(|source| StartError::Bind {
            addr: me.to_string(),
            source,
        })?;
        let inbox = Arc::new(Inbox::default());
        let shutdown = Arc::new(AtomicBool::new(false));
        let known: HashSet<LocationId> = config.peers.keys().cloned().collect();
        {
            let inbox = Arc::clone(&inbox);
            let shutdown = Arc::clone(&shutdown);
            thread::spawn(move || accept_loop(listener, inbox, shutdown, known));
        }
        Ok(TcpBackend {
            me,
            config,
            local_addr,
            inbox,
            outgoing: Mutex::new(HashMap::new()),
            shutdown,
        })
    }

    pub fn me(&self) -> &LocationId {
        &self.me
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.local_addr
    }

    fn connect(&self, to: &LocationId) -> Result<TcpStream, TransportError> {
        let addr = self
            .config
            .address(to)
            .map_err(|_| TransportError::UnknownPeer { peer: to.clone() })?;
        let deadline = Instant::now() + self.config.warmup;
        loop {
            let attempt = addr
                .to_socket_addrs()
                .and_then(|mut addrs| addrs.next().ok_or_else(|| io::Error::other("no address")))
                .and_then(|a| TcpStream::connect_timeout(&a, Duration::from_secs(1)));
            match attempt {
                Ok(mut stream) => {
                    let _ = stream.set_nodelay(true);
                    write_frame(&mut stream, self.me.as_str()).map_err(|e| TransportError::Io(e.to_string()))?;
                    return Ok(stream);
                }
                Err(e) if Instant::now() >= deadline => {
                    return Err(TransportError::Io(format!("cannot reach {to} at {addr}: {e}")));
                }
                Err(_) => thread::sleep(Duration::from_millis(25)),
            }
        }
    }

    fn own(&self, who: &LocationId) -> Result<(), TransportError> {
        if *who == self.me {
            Ok(())
        } else {
            Err(TransportError::Io(format!("backend of {} used as {who}", self.me)))
        }
    }
}

fn accept_loop(listener: TcpListener, inbox: Arc<Inbox>, shutdown: Arc<AtomicBool>, known: HashSet<LocationId>) {
    for stream in listener.incoming() {
        if shutdown.load(Ordering::SeqCst) {
            break;
        }
        let Ok(stream) = stream else { continue };
        let inbox = Arc::clone(&inbox);
        let known = known.clone();
        thread::spawn(move || read_loop(stream, &inbox, &known));
    }
}

fn read_loop(mut stream: TcpStream, inbox: &Inbox, known: &HashSet<LocationId>) {
    let sender = match read_frame(&mut stream) {
        Ok(Some(name)) => match LocationId::new(name) {
            Ok(id) if known.contains(&id) => id,
            _ => return,
        },
        _ => return,
    };
    while let Ok(Some(msg)) = read_frame(&mut stream) {
        inbox.push(&sender, msg);
    }
    inbox.close(&sender);
}

impl Backend for TcpBackend {
    fn send(&self, from: &LocationId, to: &LocationId, payload: String) -> Result<(), TransportError> {
        self.own(from)?;
        let mut out = self.outgoing.lock().unwrap_or_else(|e| e.into_inner());
        if !out.contains_key(to) {
            let stream = self.connect(to)?;
            out.insert(to.clone(), stream);
        }
        let stream = out.get_mut(to).expect("just inserted");
        write_frame(stream, &payload).map_err(|_| {
            out.remove(to);
            TransportError::Disconnected { peer: to.clone() }
        })
    }

    fn recv(&self, at: &LocationId, from: &LocationId) -> Result<String, TransportError> {
        self.own(at)?;
        if !self.config.peers.contains_key(from) {
            return Err(TransportError::UnknownPeer { peer: from.clone() });
        }
        let deadline = Instant::now() + self.config.timeout;
        let mut s = self.inbox.state.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            if let Some(msg) = s.queues.get_mut(from).and_then(VecDeque::pop_front) {
                return Ok(msg);
            }
            if s.closed.contains(from) {
                return Err(TransportError::Disconnected { peer: from.clone() });
            }
            let now = Instant::now();
            if now >= deadline {
                return Err(TransportError::Timeout { from: from.clone() });
            }
            s = self
                .inbox
                .arrived
                .wait_timeout(s, deadline - now)
                .unwrap_or_else(|e| e.into_inner())
                .0;
        }
    }

    /// Closes every connection, opening and closing one to each peer not
    /// yet contacted, so blocked peers see the end of the stream.
    fn abort(&self, party: &LocationId) {
        if *party != self.me {
            return;
        }
        let mut out = self.outgoing.lock().unwrap_or_else(|e| e.into_inner());
        for peer in self.config.peers.keys() {
            if *peer == self.me {
                continue;
            }
            if !out.contains_key(peer) {
                if let Some(stream) = self
                    .config
                    .address(peer)
                    .ok()
                    .and_then(|a| a.to_socket_addrs().ok()?.next())
                    .and_then(|a| TcpStream::connect_timeout(&a, Duration::from_millis(200)).ok())
                {
                    let mut stream = stream;
                    if write_frame(&mut stream, self.me.as_str()).is_ok() {
                        out.insert(peer.clone(), stream);
                    }
                }
            }
        }
        for (_, stream) in out.drain() {
            let _ = stream.shutdown(Shutdown::Both);
        }
    }
}

impl Drop for TcpBackend {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        let out = self.outgoing.get_mut().unwrap_or_else(|e| e.into_inner());
        for (_, stream) in out.drain() {
            let _ = stream.shutdown(Shutdown::Write);
        }
        // wake the acceptor so it notices the shutdown flag
        let _ = TcpStream::connect_timeout(&self.local_addr, Duration::from_millis(200));
    }
}
