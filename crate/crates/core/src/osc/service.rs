//! UDP OSC service: external environments submit OpenQASM circuits to
//! `/QuantumCircuit` and receive `/info` progress plus `/counts` (or
//! `/error`) replies. One receiver thread feeds a bounded queue; one
//! worker simulates, so replies to a sender keep request order while a
//! flooded queue drops fresh packets instead of building a backlog.

use std::net::{IpAddr, Ipv4Addr, SocketAddr, UdpSocket};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{sync_channel, Receiver, SyncSender, TrySendError};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use crate::error::{QacError, Result};
use crate::osc::wire::{decode_osc, encode_osc, OscArg, OscMessage};
use crate::qasm::parse_qasm;
use crate::sampling::{sample_counts_with_rng, seeded_rng, Counts};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind_addr: IpAddr,
    pub listen_port: u16,
    pub reply_port: u16,
    /// Reply to the packet's source port instead of `reply_port`.
    pub reply_to_source: bool,
    pub default_shots: u64,
    pub max_payload: usize,
    /// Seed for the fresh per-request generator; requests are stateless,
    /// so identical requests under one seed get identical replies.
    pub seed: Option<u64>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind_addr: IpAddr::V4(Ipv4Addr::LOCALHOST),
            listen_port: 7400,
            reply_port: 7401,
            reply_to_source: false,
            default_shots: 1024,
            max_payload: 16 * 1024,
            seed: None,
        }
    }
}

impl ServiceConfig {
    fn validate(&self) -> Result<()> {
        if self.listen_port == 0 {
            // port 0 binds an ephemeral port; allowed for tests
        }
        if !self.reply_to_source && self.listen_port != 0 && self.listen_port == self.reply_port {
            return Err(QacError::Argument(
                "listen and reply ports must differ".into(),
            ));
        }
        if self.default_shots == 0 {
            return Err(QacError::Argument("default shots must be at least 1".into()));
        }
        if self.max_payload < 64 {
            return Err(QacError::Argument("max payload below a minimal packet".into()));
        }
        Ok(())
    }
}

struct Job {
    qasm: String,
    shots: u64,
    reply_to: SocketAddr,
}

/// Running service; dropping it (or calling [`Service::shutdown`])
/// stops both threads.
pub struct Service {
    port: u16,
    stop: Arc<AtomicBool>,
    receiver: Option<JoinHandle<()>>,
    worker: Option<JoinHandle<()>>,
}

impl Service {
    /// The bound listen port (useful when configured with port 0).
    pub fn port(&self) -> u16 {
        self.port
    }

    pub fn shutdown(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.receiver.take() {
            let _ = h.join();
        }
        if let Some(h) = self.worker.take() {
            let _ = h.join();
        }
    }
}

impl Drop for Service {
    fn drop(&mut self) {
        self.shutdown();
    }
}

fn send_reply(socket: &UdpSocket, to: SocketAddr, address: &str, text: String) {
    let msg = OscMessage::new(address, vec![OscArg::Str(text)]);
    if let Ok(bytes) = encode_osc(&msg) {
        let _ = socket.send_to(&bytes, to);
    }
}

/// Start the service. The returned handle owns the threads.
pub fn serve(config: ServiceConfig) -> Result<Service> {
    config.validate()?;
    let socket = UdpSocket::bind((config.bind_addr, config.listen_port))?;
    socket.set_read_timeout(Some(Duration::from_millis(50)))?;
    let port = socket.local_addr()?.port();
    let stop = Arc::new(AtomicBool::new(false));
    let (tx, rx): (SyncSender<Job>, Receiver<Job>) = sync_channel(64);

    let receiver = {
        let socket = socket.try_clone()?;
        let stop = Arc::clone(&stop);
        let config = config.clone();
        std::thread::spawn(move || receive_loop(&socket, &stop, &config, &tx))
    };
    let worker = {
        let socket = socket.try_clone()?;
        let stop = Arc::clone(&stop);
        let seed = config.seed;
        std::thread::spawn(move || worker_loop(&socket, &stop, seed, &rx))
    };
    Ok(Service {
        port,
        stop,
        receiver: Some(receiver),
        worker: Some(worker),
    })
}

fn reply_target(config: &ServiceConfig, source: SocketAddr) -> SocketAddr {
    if config.reply_to_source {
        source
    } else {
        SocketAddr::new(source.ip(), config.reply_port)
    }
}

fn receive_loop(
    socket: &UdpSocket,
    stop: &AtomicBool,
    config: &ServiceConfig,
    tx: &SyncSender<Job>,
) {
    let mut buf = vec![0u8; 64 * 1024];
    while !stop.load(Ordering::SeqCst) {
        let (len, source) = match socket.recv_from(&mut buf) {
            Ok(x) => x,
            Err(e)
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                continue
            }
            Err(_) => continue,
        };
        let reply_to = reply_target(config, source);
        if len > config.max_payload {
            send_reply(
                socket,
                reply_to,
                "/error",
                format!("payload of {len} bytes exceeds the {} byte limit", config.max_payload),
            );
            continue;
        }
        let msg = match decode_osc(&buf[..len]) {
            Ok(m) => m,
            Err(e) => {
                send_reply(socket, reply_to, "/error", e.to_string());
                continue;
            }
        };
        match parse_request(&msg, config.default_shots) {
            Ok((qasm, shots)) => {
                let job = Job {
                    qasm,
                    shots,
                    reply_to,
                };
                if let Err(TrySendError::Full(job)) = tx.try_send(job) {
                    // realtime callers resend; a backlog would be staler
                    send_reply(socket, job.reply_to, "/error", "queue full, request dropped".into());
                }
            }
            Err(e) => send_reply(socket, reply_to, "/error", e.to_string()),
        }
    }
}

fn parse_request(msg: &OscMessage, default_shots: u64) -> Result<(String, u64)> {
    if msg.address != "/QuantumCircuit" {
        return Err(QacError::Wire(format!(
            "unsupported address '{}'",
            msg.address
        )));
    }
    let qasm = match msg.args.first() {
        Some(OscArg::Str(s)) => s.clone(),
        _ => {
            return Err(QacError::Wire(
                "/QuantumCircuit needs a QASM string argument".into(),
            ))
        }
    };
    let shots = match msg.args.get(1) {
        None => default_shots,
        Some(OscArg::Int(v)) if *v >= 1 => *v as u64,
        Some(OscArg::Int(v)) => {
            return Err(QacError::Argument(format!("shot count {v} must be at least 1")))
        }
        Some(_) => return Err(QacError::Wire("shots argument must be an int32".into())),
    };
    if msg.args.len() > 2 {
        return Err(QacError::Wire("too many arguments".into()));
    }
    Ok((qasm, shots))
}

fn worker_loop(socket: &UdpSocket, stop: &AtomicBool, seed: Option<u64>, rx: &Receiver<Job>) {
    while !stop.load(Ordering::SeqCst) {
        let job = match rx.recv_timeout(Duration::from_millis(50)) {
            Ok(j) => j,
            Err(_) => continue,
        };
        match run_job(&job, seed) {
            Ok((info, pairs)) => {
                send_reply(socket, job.reply_to, "/info", info);
                send_reply(socket, job.reply_to, "/counts", pairs);
            }
            Err(e) => send_reply(socket, job.reply_to, "/error", e.to_string()),
        }
    }
}

fn run_job(job: &Job, seed: Option<u64>) -> Result<(String, String)> {
    let circuit = parse_qasm(&job.qasm)?;
    // fresh generator per request: the service holds no sampling state
    let mut rng = seeded_rng(seed.unwrap_or_else(rand::random));
    let counts = sample_counts_with_rng(&circuit, job.shots, &mut rng)?;
    let info = format!(
        "circuit: {} qubit(s), {} op(s); sampled {} shot(s)",
        circuit.num_qubits(),
        circuit.len(),
        job.shots
    );
    Ok((info, counts.pairs()))
}

/// Send one request and wait for its `/counts` (skipping `/info`).
/// `reply_port` must be given when the target service replies to a
/// fixed port; otherwise an ephemeral socket receives the reply.
pub fn client_request(
    target: SocketAddr,
    qasm: &str,
    shots: Option<u64>,
    timeout_ms: u64,
    reply_port: Option<u16>,
) -> Result<Counts> {
    let recv_socket = UdpSocket::bind((Ipv4Addr::LOCALHOST, reply_port.unwrap_or(0)))?;
    let mut args = vec![OscArg::Str(qasm.to_string())];
    if let Some(s) = shots {
        let s = i32::try_from(s).map_err(|_| QacError::Argument("shots exceed int32".into()))?;
        args.push(OscArg::Int(s));
    }
    let request = encode_osc(&OscMessage::new("/QuantumCircuit", args))?;
    // send from the receiving socket so reply-to-source services reach us
    recv_socket.send_to(&request, target)?;

    let deadline = Instant::now() + Duration::from_millis(timeout_ms);
    let mut buf = vec![0u8; 64 * 1024];
    loop {
        let remaining = deadline
            .checked_duration_since(Instant::now())
            .ok_or(QacError::Timeout(timeout_ms))?;
        recv_socket.set_read_timeout(Some(remaining.max(Duration::from_millis(1))))?;
        let (len, _) = match recv_socket.recv_from(&mut buf) {
            Ok(x) => x,
            Err(e)
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                return Err(QacError::Timeout(timeout_ms))
            }
            Err(e) => return Err(e.into()),
        };
        let msg = decode_osc(&buf[..len])?;
        match msg.address.as_str() {
            "/info" => continue,
            "/counts" => {
                let Some(OscArg::Str(pairs)) = msg.args.first() else {
                    return Err(QacError::Wire("/counts carries no pairs string".into()));
                };
                return Counts::from_pairs(pairs)
                    .map_err(|e| QacError::Wire(format!("bad counts payload: {e}")));
            }
            "/error" => {
                let text = match msg.args.first() {
                    Some(OscArg::Str(s)) => s.clone(),
                    _ => "unspecified error".into(),
                };
                return Err(QacError::Remote(text));
            }
            other => return Err(QacError::Wire(format!("unexpected reply '{other}'"))),
        }
    }
}
