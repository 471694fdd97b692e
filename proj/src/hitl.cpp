#include "swingreach/hitl.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <thread>

#include "swingreach/io.hpp"

namespace swingreach::hitl {

using io::format_double;
using io::parse_double;

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

Frame Frame::hello(std::uint64_t seq, double dt, std::string digest) {
    return {seq, HelloPayload{kProtocolVersion, dt, std::move(digest)}};
}

Frame Frame::step(std::uint64_t seq, double t, const State& state) {
    return {seq, StepPayload{t, state}};
}

Frame Frame::cmd(std::uint64_t seq, double d, RelayStatus relay) {
    return {seq, CmdPayload{d, relay}};
}

Frame Frame::bye(std::uint64_t seq, std::string reason) {
    return {seq, ByePayload{std::move(reason)}};
}

namespace {

const char* relay_token(RelayStatus r) {
    return r == RelayStatus::Closed ? "CLOSED" : "OPEN";
}

RelayStatus parse_relay(std::string_view token, std::string_view line) {
    if (token == "CLOSED") return RelayStatus::Closed;
    if (token == "OPEN") return RelayStatus::Open;
    throw ProtocolError("bad relay token in frame: '" + std::string(line) + "'");
}

std::uint64_t parse_seq(std::string_view token, std::string_view line) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ProtocolError("bad sequence number in frame: '" + std::string(line) + "'");
    }
    return v;
}

double parse_num(std::string_view token, std::string_view line) {
    try {
        return parse_double(token);
    } catch (const std::invalid_argument&) {
        throw ProtocolError("bad number in frame: '" + std::string(line) + "'");
    }
}

std::vector<std::string_view> tokens_of(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ' ') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

std::string encode(const Frame& frame) {
    std::string out;
    switch (frame.kind()) {
        case FrameKind::Hello: {
            const auto& h = std::get<HelloPayload>(frame.payload);
            out = "HELLO " + std::to_string(frame.seq) + ' ' + std::to_string(h.version) +
                  ' ' + format_double(h.dt) + ' ' + h.digest;
            break;
        }
        case FrameKind::Step: {
            const auto& s = std::get<StepPayload>(frame.payload);
            out = "STEP " + std::to_string(frame.seq) + ' ' + format_double(s.t) + ' ' +
                  format_double(s.state.delta) + ' ' + format_double(s.state.omega);
            break;
        }
        case FrameKind::Cmd: {
            const auto& c = std::get<CmdPayload>(frame.payload);
            out = "CMD " + std::to_string(frame.seq) + ' ' + format_double(c.d) + ' ' +
                  relay_token(c.relay);
            break;
        }
        case FrameKind::Bye: {
            const auto& b = std::get<ByePayload>(frame.payload);
            out = "BYE " + std::to_string(frame.seq);
            if (!b.reason.empty()) out += ' ' + b.reason;
            break;
        }
    }
    out += '\n';
    return out;
}

Frame decode(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
        line.remove_suffix(1);
    }
    if (line.empty()) throw ProtocolError("empty frame line");
    const auto toks = tokens_of(line);
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        if (toks[i].empty()) throw ProtocolError("malformed spacing in frame: '" + std::string(line) + "'");
    }
    const std::string_view kind = toks[0];
    if (kind == "HELLO") {
        if (toks.size() != 5) throw ProtocolError("Hello frame needs 4 fields: '" + std::string(line) + "'");
        Frame f;
        f.seq = parse_seq(toks[1], line);
        HelloPayload h;
        h.version = static_cast<int>(parse_num(toks[2], line));
        h.dt = parse_num(toks[3], line);
        h.digest = std::string(toks[4]);
        f.payload = std::move(h);
        return f;
    }
    if (kind == "STEP") {
        if (toks.size() != 5) throw ProtocolError("Step frame needs 4 fields: '" + std::string(line) + "'");
        return Frame::step(parse_seq(toks[1], line), parse_num(toks[2], line),
                           {parse_num(toks[3], line), parse_num(toks[4], line)});
    }
    if (kind == "CMD") {
        if (toks.size() != 4) throw ProtocolError("Cmd frame needs 3 fields: '" + std::string(line) + "'");
        return Frame::cmd(parse_seq(toks[1], line), parse_num(toks[2], line),
                          parse_relay(toks[3], line));
    }
    if (kind == "BYE") {
        if (toks.size() < 2) throw ProtocolError("Bye frame needs a sequence number: '" + std::string(line) + "'");
        const std::uint64_t seq = parse_seq(toks[1], line);
        std::string reason;
        const std::size_t head = 4 + toks[1].size();  // "BYE " + seq
        if (line.size() > head) reason = std::string(line.substr(head + 1));
        return Frame::bye(seq, std::move(reason));
    }
    throw ProtocolError("unknown frame kind: '" + std::string(line) + "'");
}

std::string param_digest(const SmibParams& params, double dt) {
    const std::string canon = format_double(params.inertia) + '|' +
                              format_double(params.damping) + '|' +
                              format_double(params.mech_power) + '|' +
                              format_double(params.max_electric_power) + '|' +
                              format_double(params.local_load) + '|' + format_double(dt);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// In-memory pipe transport
// ---------------------------------------------------------------------------

namespace {

struct ByteChannel {
    std::mutex m;
    std::condition_variable cv;
    std::string buf;
    bool closed = false;

    void push(std::string_view bytes) {
        {
            std::lock_guard lock(m);
            if (closed) return;  // peer is gone; drop like a broken pipe
            buf.append(bytes);
        }
        cv.notify_all();
    }

    RecvResult pop_line(std::chrono::milliseconds timeout) {
        std::unique_lock lock(m);
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        for (;;) {
            const auto pos = buf.find('\n');
            if (pos != std::string::npos) {
                std::string line = buf.substr(0, pos);
                buf.erase(0, pos + 1);
                return {RecvStatus::Line, std::move(line)};
            }
            if (closed) return {RecvStatus::Closed, {}};
            if (cv.wait_until(lock, deadline) == std::cv_status::timeout) {
                return {RecvStatus::Timeout, {}};
            }
        }
    }

    void close() {
        {
            std::lock_guard lock(m);
            closed = true;
        }
        cv.notify_all();
    }
};

class PipeEnd final : public Transport {
public:
    PipeEnd(std::shared_ptr<ByteChannel> tx, std::shared_ptr<ByteChannel> rx)
        : tx_(std::move(tx)), rx_(std::move(rx)) {}

    ~PipeEnd() override {
        tx_->close();
        rx_->close();
    }

    void send_bytes(std::string_view bytes) override { tx_->push(bytes); }

    RecvResult recv_line(std::chrono::milliseconds timeout) override {
        return rx_->pop_line(timeout);
    }

private:
    std::shared_ptr<ByteChannel> tx_, rx_;
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_pipe_pair() {
    auto ab = std::make_shared<ByteChannel>();
    auto ba = std::make_shared<ByteChannel>();
    return {std::make_unique<PipeEnd>(ab, ba), std::make_unique<PipeEnd>(ba, ab)};
}

// ---------------------------------------------------------------------------
// TCP transport
// ---------------------------------------------------------------------------

namespace {

class TcpTransport final : public Transport {
public:
    explicit TcpTransport(int fd) : fd_(fd) {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }

    ~TcpTransport() override {
        if (fd_ >= 0) ::close(fd_);
    }

    void send_bytes(std::string_view bytes) override {
        std::size_t sent = 0;
        while (sent < bytes.size()) {
            const ssize_t n =
                ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                return;  // broken pipe; the reader will observe Closed
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    RecvResult recv_line(std::chrono::milliseconds timeout) override {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        for (;;) {
            const auto pos = buf_.find('\n');
            if (pos != std::string::npos) {
                std::string line = buf_.substr(0, pos);
                buf_.erase(0, pos + 1);
                return {RecvStatus::Line, std::move(line)};
            }
            if (eof_) return {RecvStatus::Closed, {}};
            const auto now = std::chrono::steady_clock::now();
            if (now >= deadline) return {RecvStatus::Timeout, {}};
            pollfd pf{fd_, POLLIN, 0};
            const auto wait =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
            const int pr = ::poll(&pf, 1, static_cast<int>(std::max<long>(wait.count(), 1)));
            if (pr < 0) {
                if (errno == EINTR) continue;
                return {RecvStatus::Closed, {}};
            }
            if (pr == 0) return {RecvStatus::Timeout, {}};
            char chunk[4096];
            const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n < 0) {
                if (errno == EINTR) continue;
                return {RecvStatus::Closed, {}};
            }
            if (n == 0) {
                eof_ = true;
                continue;
            }
            buf_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    int fd_;
    std::string buf_;
    bool eof_ = false;
};

}  // namespace

TcpListener::TcpListener(uint16_t port, const std::string& host) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw std::runtime_error("TcpListener: socket() failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw std::runtime_error("TcpListener: bad host address " + host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(fd_, 4) != 0) {
        ::close(fd_);
        throw std::runtime_error("TcpListener: cannot listen on " + host + ":" +
                                 std::to_string(port));
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept(std::chrono::milliseconds timeout) {
    pollfd pf{fd_, POLLIN, 0};
    const int pr = ::poll(&pf, 1, static_cast<int>(timeout.count()));
    if (pr <= 0) throw std::runtime_error("TcpListener: accept timed out");
    const int client = ::accept(fd_, nullptr, nullptr);
    if (client < 0) throw std::runtime_error("TcpListener: accept() failed");
    return std::make_unique<TcpTransport>(client);
}

std::unique_ptr<Transport> tcp_connect(const std::string& host, uint16_t port,
                                       std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    for (;;) {
        addrinfo* res = nullptr;
        if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) == 0) {
            for (addrinfo* ai = res; ai; ai = ai->ai_next) {
                const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
                if (fd < 0) continue;
                if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
                    ::freeaddrinfo(res);
                    return std::make_unique<TcpTransport>(fd);
                }
                ::close(fd);
            }
            ::freeaddrinfo(res);
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            throw std::runtime_error("tcp_connect: cannot reach " + host + ":" +
                                     std::to_string(port));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

// ---------------------------------------------------------------------------
// Endpoints
// ---------------------------------------------------------------------------

namespace {

void send_frame(Transport& link, const Frame& frame) { link.send_bytes(encode(frame)); }

std::string status_text(RecvStatus s) {
    return s == RecvStatus::Timeout ? "timeout" : "connection closed";
}

}  // namespace

PlantRun run_plant_endpoint(const SmibParams& params, const State& x0, double dt,
                            double horizon, Transport& link,
                            std::chrono::milliseconds timeout, bool realtime) {
    params.validate();
    if (!(dt > 0.0) || !(horizon >= dt)) {
        throw std::invalid_argument("run_plant_endpoint: need dt > 0 and horizon >= dt");
    }
    const std::string digest = param_digest(params, dt);
    PlantRun run;

    send_frame(link, Frame::hello(0, dt, digest));
    const RecvResult hello = link.recv_line(timeout);
    if (hello.status != RecvStatus::Line) {
        run.abort_reason = status_text(hello.status) + " during handshake";
        return run;
    }
    const Frame reply = decode(hello.line);
    if (reply.kind() == FrameKind::Bye) {
        run.abort_reason = "peer: " + std::get<ByePayload>(reply.payload).reason;
        return run;
    }
    if (reply.kind() != FrameKind::Hello) {
        throw ProtocolError("expected Hello reply, got '" + hello.line + "'");
    }
    const auto& h = std::get<HelloPayload>(reply.payload);
    if (h.version != kProtocolVersion) {
        throw ProtocolError("protocol version mismatch: ours " +
                            std::to_string(kProtocolVersion) + ", peer " +
                            std::to_string(h.version));
    }
    if (h.dt != dt || h.digest != digest) {
        throw ProtocolError("handshake mismatch: dt/digest " + format_double(dt) + "/" +
                            digest + " vs peer " + format_double(h.dt) + "/" + h.digest);
    }

    const long steps = static_cast<long>(std::floor(horizon / dt));
    run.trajectory.samples.reserve(steps + 1);
    State x = x0;
    std::uint64_t seq = 0;
    const auto start = std::chrono::steady_clock::now();
    for (long k = 0; k <= steps; ++k) {
        const double t = k * dt;
        if (!is_finite(x)) {
            run.trajectory.divergent = true;
            send_frame(link, Frame::bye(seq + 1, "plant state diverged"));
            return run;
        }
        if (realtime) {
            std::this_thread::sleep_until(
                start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(t)));
        }
        ++seq;
        send_frame(link, Frame::step(seq, t, x));
        const RecvResult rr = link.recv_line(timeout);
        if (rr.status != RecvStatus::Line) {
            run.abort_reason = status_text(rr.status) + " waiting for Cmd " +
                               std::to_string(seq);
            return run;
        }
        const Frame f = decode(rr.line);
        if (f.kind() == FrameKind::Bye) {
            run.abort_reason = "peer: " + std::get<ByePayload>(f.payload).reason;
            return run;
        }
        if (f.kind() != FrameKind::Cmd) {
            throw ProtocolError("expected Cmd, got '" + rr.line + "'");
        }
        if (f.seq != seq) {
            throw ProtocolError("lockstep violation: Cmd seq " + std::to_string(f.seq) +
                                " does not answer Step seq " + std::to_string(seq));
        }
        const auto& cmd = std::get<CmdPayload>(f.payload);
        run.trajectory.samples.push_back({t, x, cmd.d, cmd.relay});
        if (k < steps) x = rk4_step(x, params, cmd.relay, cmd.d, dt);
    }
    send_frame(link, Frame::bye(seq + 1, "done"));
    return run;
}

ControllerRun run_controller_endpoint(const DisturbancePolicy& policy,
                                      const RelaySchedule& relay_schedule,
                                      const SmibParams& params, double dt, Transport& link,
                                      std::chrono::milliseconds timeout) {
    params.validate();
    const std::string digest = param_digest(params, dt);
    ControllerRun run;

    const RecvResult first = link.recv_line(timeout);
    if (first.status != RecvStatus::Line) {
        run.abort_reason = status_text(first.status) + " waiting for Hello";
        return run;
    }
    const Frame hello = decode(first.line);
    if (hello.kind() != FrameKind::Hello) {
        throw ProtocolError("expected Hello, got '" + first.line + "'");
    }
    const auto& h = std::get<HelloPayload>(hello.payload);
    if (h.version != kProtocolVersion) {
        Frame bye = Frame::bye(0, "protocol version mismatch");
        send_frame(link, bye);
        throw ProtocolError("protocol version mismatch: ours " +
                            std::to_string(kProtocolVersion) + ", peer " +
                            std::to_string(h.version));
    }
    if (h.dt != dt || h.digest != digest) {
        send_frame(link, Frame::bye(0, "handshake mismatch"));
        throw ProtocolError("handshake mismatch: dt/digest " + format_double(dt) + "/" +
                            digest + " vs peer " + format_double(h.dt) + "/" + h.digest);
    }
    Frame reply = Frame::hello(0, dt, digest);
    send_frame(link, reply);
    run.command_log.push_back(reply);

    std::uint64_t expected = 1;
    for (;;) {
        const RecvResult rr = link.recv_line(timeout);
        if (rr.status != RecvStatus::Line) {
            run.abort_reason = status_text(rr.status) + " waiting for Step " +
                               std::to_string(expected);
            return run;
        }
        const Frame f = decode(rr.line);
        if (f.kind() == FrameKind::Bye) {
            run.peer_bye_reason = std::get<ByePayload>(f.payload).reason;
            return run;
        }
        if (f.kind() != FrameKind::Step) {
            throw ProtocolError("expected Step, got '" + rr.line + "'");
        }
        if (f.seq != expected) {
            throw ProtocolError("lockstep violation: Step seq " + std::to_string(f.seq) +
                                ", expected " + std::to_string(expected));
        }
        const auto& step = std::get<StepPayload>(f.payload);
        Frame cmd = Frame::cmd(f.seq, policy(step.t, step.state), relay_schedule(step.t));
        send_frame(link, cmd);
        run.command_log.push_back(cmd);
        ++expected;
    }
}

// ---------------------------------------------------------------------------
// Spoof proxy
// ---------------------------------------------------------------------------

void SpoofRule::validate() const {
    if (!(t_begin <= t_end)) {
        throw std::invalid_argument("SpoofRule: window start must not exceed end");
    }
    if (d_constant && d_policy) {
        throw std::invalid_argument("SpoofRule: choose a constant or a policy, not both");
    }
}

ProxyResult run_spoof_proxy(const std::vector<SpoofRule>& rules,
                            const DisturbanceBound& scenario_bound, Transport& plant_side,
                            Transport& controller_side, std::chrono::milliseconds timeout) {
    scenario_bound.validate();
    for (const auto& rule : rules) rule.validate();
    ProxyResult result;

    double last_t = 0.0;
    State last_state{};
    bool saw_step = false;

    // Step and Bye frames from the plant pass through verbatim; Cmd
    // frames from the controller may be rewritten en route back.
    auto forward_raw = [](Transport& to, const std::string& line) {
        to.send_bytes(line + "\n");
    };

    auto handle_cmd = [&](const std::string& line) {
        Frame f = decode(line);
        if (f.kind() != FrameKind::Cmd) {
            forward_raw(plant_side, line);
            return;
        }
        const double t = saw_step ? last_t : 0.0;
        const SpoofRule* active = nullptr;
        int active_count = 0;
        for (const auto& rule : rules) {
            if (rule.active(t)) {
                ++active_count;
                if (!active) active = &rule;
            }
        }
        if (active_count > 1) {
            result.warnings.push_back("overlapping rules at t=" + format_double(t) +
                                      " (seq " + std::to_string(f.seq) +
                                      "); first listed wins");
        }
        if (!active) {
            forward_raw(plant_side, line);
            return;
        }
        auto& cmd = std::get<CmdPayload>(f.payload);
        bool changed = false;
        if (active->d_constant || active->d_policy) {
            const double raw = active->d_policy ? active->d_policy(last_t, last_state)
                                                : *active->d_constant;
            const double clamped = std::clamp(raw, scenario_bound.lower, scenario_bound.upper);
            if (clamped != raw) {
                result.warnings.push_back("override d " + format_double(raw) +
                                          " clamped to " + format_double(clamped) +
                                          " at seq " + std::to_string(f.seq));
            }
            if (clamped != cmd.d) {
                result.tamper_log.push_back(
                    {f.seq, t, "d", format_double(cmd.d), format_double(clamped)});
                cmd.d = clamped;
                changed = true;
            }
        }
        if (active->relay_override && *active->relay_override != cmd.relay) {
            result.tamper_log.push_back({f.seq, t, "relay", relay_token(cmd.relay),
                                         relay_token(*active->relay_override)});
            cmd.relay = *active->relay_override;
            changed = true;
        }
        if (changed) {
            plant_side.send_bytes(encode(f));
        } else {
            forward_raw(plant_side, line);
        }
    };

    // Handshake passes through untouched in both directions.
    {
        const RecvResult up = plant_side.recv_line(timeout);
        if (up.status != RecvStatus::Line) {
            result.warnings.push_back("plant link " + status_text(up.status) +
                                      " before handshake");
            return result;
        }
        forward_raw(controller_side, up.line);
        const RecvResult down = controller_side.recv_line(timeout);
        if (down.status != RecvStatus::Line) {
            result.warnings.push_back("controller link " + status_text(down.status) +
                                      " during handshake");
            forward_raw(plant_side, encode(Frame::bye(0, "proxy: controller unavailable")));
            return result;
        }
        forward_raw(plant_side, down.line);
        if (decode(down.line).kind() == FrameKind::Bye) return result;
    }

    for (;;) {
        const RecvResult up = plant_side.recv_line(timeout);
        if (up.status != RecvStatus::Line) {
            result.warnings.push_back("plant link " + status_text(up.status));
            forward_raw(controller_side,
                        encode(Frame::bye(0, "proxy: plant " + status_text(up.status))));
            return result;
        }
        const Frame f = decode(up.line);
        forward_raw(controller_side, up.line);
        if (f.kind() == FrameKind::Bye) return result;
        if (f.kind() == FrameKind::Step) {
            const auto& step = std::get<StepPayload>(f.payload);
            last_t = step.t;
            last_state = step.state;
            saw_step = true;
        } else {
            continue;
        }

        const RecvResult down = controller_side.recv_line(timeout);
        if (down.status != RecvStatus::Line) {
            result.warnings.push_back("controller link " + status_text(down.status));
            forward_raw(plant_side,
                        encode(Frame::bye(0, "proxy: controller " + status_text(down.status))));
            return result;
        }
        if (decode(down.line).kind() == FrameKind::Bye) {
            forward_raw(plant_side, down.line);
            return result;
        }
        handle_cmd(down.line);
    }
}

}  // namespace swingreach::hitl
