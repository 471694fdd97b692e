#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "swingreach/hjsolver.hpp"
#include "swingreach/plant.hpp"
#include "swingreach/types.hpp"

namespace swingreach::hitl {

constexpr int kProtocolVersion = 1;
constexpr std::chrono::milliseconds kDefaultTimeout{5000};

// ---------------------------------------------------------------------------
// Wire frames. One text line per frame: `KIND seq field...` terminated
// by '\n'; numbers rendered shortest-round-trip so decode(encode(f))
// reproduces every payload bit for bit.
// ---------------------------------------------------------------------------

enum class FrameKind { Hello, Step, Cmd, Bye };

struct HelloPayload {
    int version = kProtocolVersion;
    double dt = 0.0;
    std::string digest;  // parameter digest; both endpoints must agree

    bool operator==(const HelloPayload&) const = default;
};

struct StepPayload {
    double t = 0.0;
    State state;

    bool operator==(const StepPayload&) const = default;
};

struct CmdPayload {
    double d = 0.0;
    RelayStatus relay = RelayStatus::Closed;

    bool operator==(const CmdPayload&) const = default;
};

struct ByePayload {
    std::string reason;

    bool operator==(const ByePayload&) const = default;
};

struct Frame {
    std::uint64_t seq = 0;
    std::variant<HelloPayload, StepPayload, CmdPayload, ByePayload> payload;

    FrameKind kind() const { return static_cast<FrameKind>(payload.index()); }

    static Frame hello(std::uint64_t seq, double dt, std::string digest);
    static Frame step(std::uint64_t seq, double t, const State& state);
    static Frame cmd(std::uint64_t seq, double d, RelayStatus relay);
    static Frame bye(std::uint64_t seq, std::string reason);

    bool operator==(const Frame&) const = default;
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full wire line including the trailing newline.
std::string encode(const Frame& frame);

/// Parses one line (trailing newline optional). Throws ProtocolError
/// quoting the offending text.
Frame decode(std::string_view line);

/// FNV-1a digest of the plant parameters and step size; endpoints
/// compare digests during the handshake.
std::string param_digest(const SmibParams& params, double dt);

// ---------------------------------------------------------------------------
// Byte-stream transports.
// ---------------------------------------------------------------------------

enum class RecvStatus { Line, Timeout, Closed };

struct RecvResult {
    RecvStatus status = RecvStatus::Closed;
    std::string line;  // without the trailing newline
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual void send_bytes(std::string_view bytes) = 0;
    virtual RecvResult recv_line(std::chrono::milliseconds timeout) = 0;
};

/// In-memory duplex byte stream; returns the two ends.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_pipe_pair();

/// Loopback/remote TCP. The listener binds immediately; port 0 picks an
/// ephemeral port readable via port().
class TcpListener {
public:
    explicit TcpListener(uint16_t port, const std::string& host = "127.0.0.1");
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    uint16_t port() const { return port_; }
    std::unique_ptr<Transport> accept(std::chrono::milliseconds timeout = kDefaultTimeout);

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

/// Connects with retries until the deadline (server may start late).
std::unique_ptr<Transport> tcp_connect(const std::string& host, uint16_t port,
                                       std::chrono::milliseconds timeout = kDefaultTimeout);

// ---------------------------------------------------------------------------
// Lockstep endpoints. The plant sends Step, blocks for Cmd, integrates
// one dt with the received (d, relay), repeats; sequence numbers
// increase by one per direction and each Cmd echoes its Step's seq.
// ---------------------------------------------------------------------------

struct PlantRun {
    Trajectory trajectory;
    std::optional<std::string> abort_reason;  // timeout, peer Bye, or closed stream
};

/// realtime paces steps against the wall clock; off by default, the
/// exchange runs as fast as the link allows.
PlantRun run_plant_endpoint(const SmibParams& params, const State& x0, double dt,
                            double horizon, Transport& link,
                            std::chrono::milliseconds timeout = kDefaultTimeout,
                            bool realtime = false);

struct ControllerRun {
    std::vector<Frame> command_log;  // every frame sent, in order
    std::optional<std::string> abort_reason;
    std::optional<std::string> peer_bye_reason;
};

ControllerRun run_controller_endpoint(const DisturbancePolicy& policy,
                                      const RelaySchedule& relay_schedule,
                                      const SmibParams& params, double dt, Transport& link,
                                      std::chrono::milliseconds timeout = kDefaultTimeout);

// ---------------------------------------------------------------------------
// Man-in-the-middle proxy.
// ---------------------------------------------------------------------------

/// Rewrites Cmd frames inside the active window; Step frames always
/// pass through untouched. Overridden d is clamped to the scenario
/// disturbance bound.
struct SpoofRule {
    double t_begin = 0.0;
    double t_end = std::numeric_limits<double>::infinity();
    std::optional<double> d_constant;
    DisturbancePolicy d_policy;  // evaluated at the last Step's (t, state)
    std::optional<RelayStatus> relay_override;

    bool active(double t) const { return t >= t_begin && t <= t_end; }
    void validate() const;
};

struct TamperRecord {
    std::uint64_t seq = 0;
    double t = 0.0;
    std::string field;   // "d" or "relay"
    std::string before;
    std::string after;
};

struct ProxyResult {
    std::vector<TamperRecord> tamper_log;
    std::vector<std::string> warnings;  // overlapping rules, clamped overrides
};

ProxyResult run_spoof_proxy(const std::vector<SpoofRule>& rules,
                            const DisturbanceBound& scenario_bound, Transport& plant_side,
                            Transport& controller_side,
                            std::chrono::milliseconds timeout = kDefaultTimeout);

}  // namespace swingreach::hitl
