#include "gridlevel/harness.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <mutex>

#include "gridlevel/json_io.hpp"

namespace gridlevel {

using nlohmann::json;

ConsumptionReport serve_meter(const HouseholdSpec& household,
                              const PriceAnnouncement& announcement) {
    const HouseholdResponse response = solve_household(announcement.prices, household);
    ConsumptionReport report;
    report.request_id = announcement.request_id;
    report.customer_id = household.id;
    report.hourly_load = response.total_schedule;
    report.bill = response.bill;
    return report;
}

namespace {

// ---- shared wire helpers -------------------------------------------------

constexpr std::size_t kMaxFrameBytes = 16u << 20;

void send_all(int fd, const void* data, std::size_t len) {
    const char* p = static_cast<const char*>(data);
    while (len > 0) {
        const ssize_t n = ::send(fd, p, len, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(TransportError::Kind::Connection,
                                 std::string("send failed: ") + std::strerror(errno));
        }
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

void write_frame(int fd, const json& message) {
    const std::string body = message.dump();
    if (body.size() > kMaxFrameBytes)
        throw TransportError(TransportError::Kind::Protocol, "frame too large");
    unsigned char header[4];
    const std::uint32_t n = static_cast<std::uint32_t>(body.size());
    header[0] = static_cast<unsigned char>(n >> 24);
    header[1] = static_cast<unsigned char>(n >> 16);
    header[2] = static_cast<unsigned char>(n >> 8);
    header[3] = static_cast<unsigned char>(n);
    send_all(fd, header, 4);
    send_all(fd, body.data(), body.size());
}

// Reads exactly len bytes; deadline < 0 means block forever. Throws Timeout
// when the deadline passes before the frame completes.
void recv_all(int fd, void* data, std::size_t len, std::chrono::milliseconds deadline,
              std::optional<int> customer_id) {
    char* p = static_cast<char*>(data);
    const auto start = std::chrono::steady_clock::now();
    while (len > 0) {
        if (deadline.count() >= 0) {
            const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start);
            const auto left = deadline - elapsed;
            if (left.count() <= 0)
                throw TransportError(TransportError::Kind::Timeout, "reply deadline exceeded",
                                     customer_id);
            pollfd pfd{fd, POLLIN, 0};
            const int pr = ::poll(&pfd, 1, static_cast<int>(left.count()));
            if (pr == 0)
                throw TransportError(TransportError::Kind::Timeout, "reply deadline exceeded",
                                     customer_id);
            if (pr < 0) {
                if (errno == EINTR) continue;
                throw TransportError(TransportError::Kind::Connection,
                                     std::string("poll failed: ") + std::strerror(errno),
                                     customer_id);
            }
        }
        const ssize_t n = ::recv(fd, p, len, 0);
        if (n == 0)
            throw TransportError(TransportError::Kind::Connection, "peer closed connection",
                                 customer_id);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(TransportError::Kind::Connection,
                                 std::string("recv failed: ") + std::strerror(errno), customer_id);
        }
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

json read_frame(int fd, std::chrono::milliseconds deadline = std::chrono::milliseconds(-1),
                std::optional<int> customer_id = {}) {
    unsigned char header[4];
    recv_all(fd, header, 4, deadline, customer_id);
    const std::uint32_t n = (static_cast<std::uint32_t>(header[0]) << 24) |
                            (static_cast<std::uint32_t>(header[1]) << 16) |
                            (static_cast<std::uint32_t>(header[2]) << 8) |
                            static_cast<std::uint32_t>(header[3]);
    if (n > kMaxFrameBytes)
        throw TransportError(TransportError::Kind::Protocol, "oversized frame", customer_id);
    std::string body(n, '\0');
    recv_all(fd, body.data(), n, deadline, customer_id);
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw TransportError(TransportError::Kind::Protocol,
                             std::string("bad frame body: ") + e.what(), customer_id);
    }
}

json report_to_json(const ConsumptionReport& r) {
    return json{{"type", "report"},
                {"request_id", r.request_id},
                {"customer_id", r.customer_id},
                {"hourly_load", r.hourly_load},
                {"bill", r.bill}};
}

ConsumptionReport report_from_json(const json& j) {
    ConsumptionReport r;
    r.request_id = j.at("request_id").get<std::uint64_t>();
    r.customer_id = j.at("customer_id").get<int>();
    r.hourly_load = j.at("hourly_load").get<ConsumptionSchedule>();
    r.bill = j.at("bill").get<Money>();
    return r;
}

// Runs fn(i) for i in [0, count) on `threads` workers; exceptions are
// re-thrown on the caller thread after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

// ---- in-process transport --------------------------------------------------

InprocTransport::InprocTransport(std::vector<HouseholdSpec> households, int threads)
    : households_(std::move(households)),
      threads_(threads > 0 ? threads
                           : std::max(1u, std::thread::hardware_concurrency())) {
    std::sort(households_.begin(), households_.end(),
              [](const HouseholdSpec& a, const HouseholdSpec& b) { return a.id < b.id; });
}

std::vector<ConsumptionSchedule> InprocTransport::announce_and_collect(
    const std::vector<PriceVector>& batch) {
    std::vector<ConsumptionSchedule> aggregates(batch.size());
    const std::uint64_t id_base = next_request_id_;
    next_request_id_ += batch.size();
    parallel_for(batch.size(), threads_, [&](std::size_t i) {
        PriceAnnouncement announcement{id_base + i, batch[i]};
        ConsumptionSchedule sum;
        for (const HouseholdSpec& hh : households_) sum += serve_meter(hh, announcement).hourly_load;
        aggregates[i] = sum;
    });
    return aggregates;
}

// ---- meter host (server side) ----------------------------------------------

MeterHost::MeterHost(std::vector<HouseholdSpec> households) : households_(std::move(households)) {}

MeterHost::~MeterHost() { stop(); }

std::uint16_t MeterHost::start(const std::string& bind_address, std::uint16_t port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0)
        throw TransportError(TransportError::Kind::Connection,
                             std::string("socket failed: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1)
        throw TransportError(TransportError::Kind::Connection,
                             "bad bind address: " + bind_address);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0)
        throw TransportError(TransportError::Kind::Connection,
                             std::string("bind failed: ") + std::strerror(errno));
    if (::listen(listen_fd_, 128) < 0)
        throw TransportError(TransportError::Kind::Connection,
                             std::string("listen failed: ") + std::strerror(errno));

    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);

    running_ = true;
    accept_thread_ = std::thread([this]() { accept_loop(); });
    return ntohs(bound.sin_port);
}

void MeterHost::stop() {
    if (!running_.exchange(false)) return;
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    for (auto& t : sessions_)
        if (t.joinable()) t.join();
    sessions_.clear();
}

void MeterHost::accept_loop() {
    while (running_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            return;  // listener closed
        }
        sessions_.emplace_back([this, fd]() { serve_connection(fd); });
    }
}

void MeterHost::serve_connection(int fd) {
    // Reads in short poll slices so stop() can interrupt idle sessions.
    auto read_frame_or_stop = [this, fd]() -> json {
        for (;;) {
            if (!running_)
                throw TransportError(TransportError::Kind::Connection, "host stopping");
            pollfd pfd{fd, POLLIN, 0};
            const int pr = ::poll(&pfd, 1, 200);
            if (pr < 0 && errno != EINTR)
                throw TransportError(TransportError::Kind::Connection,
                                     std::string("poll failed: ") + std::strerror(errno));
            if (pr > 0) return read_frame(fd);
        }
    };
    try {
        const json hello = read_frame_or_stop();
        if (hello.at("type") != "hello" || hello.at("protocol_version") != kProtocolVersion) {
            write_frame(fd, json{{"type", "error"}, {"message", "bad handshake"}});
            ::close(fd);
            return;
        }
        const int customer_id = hello.at("customer_id").get<int>();
        const auto it =
            std::find_if(households_.begin(), households_.end(),
                         [customer_id](const HouseholdSpec& h) { return h.id == customer_id; });
        if (it == households_.end()) {
            write_frame(fd, json{{"type", "error"},
                                 {"customer_id", customer_id},
                                 {"message", "unknown customer"}});
            ::close(fd);
            return;
        }
        write_frame(fd, json{{"type", "hello_ack"},
                             {"protocol_version", kProtocolVersion},
                             {"customer_id", customer_id}});

        while (running_) {
            json msg;
            try {
                msg = read_frame_or_stop();
            } catch (const TransportError&) {
                break;  // client went away or host stopping
            }
            const std::string type = msg.at("type").get<std::string>();
            if (type == "bye") break;
            if (type != "announce") {
                write_frame(fd, json{{"type", "error"},
                                     {"customer_id", customer_id},
                                     {"message", "unexpected message: " + type}});
                break;
            }
            PriceAnnouncement announcement;
            announcement.request_id = msg.at("request_id").get<std::uint64_t>();
            announcement.prices = msg.at("prices").get<PriceVector>();
            try {
                write_frame(fd, report_to_json(serve_meter(*it, announcement)));
                ++announcements_served_;
            } catch (const SolveError& e) {
                write_frame(fd, json{{"type", "error"},
                                     {"customer_id", customer_id},
                                     {"message", e.what()}});
                break;
            }
        }
    } catch (const std::exception&) {
        // connection failure or malformed frame; drop the session
    }
    ::close(fd);
}

// ---- TCP transport (client side) -------------------------------------------

TcpTransport::TcpTransport(const std::string& host, std::uint16_t port,
                           std::vector<int> customer_ids, std::chrono::milliseconds reply_timeout)
    : reply_timeout_(reply_timeout) {
    std::sort(customer_ids.begin(), customer_ids.end());
    connections_.reserve(customer_ids.size());
    for (int id : customer_ids) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0)
            throw TransportError(TransportError::Kind::Connection,
                                 std::string("socket failed: ") + std::strerror(errno), id);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd);
            throw TransportError(TransportError::Kind::Connection, "bad meter address: " + host, id);
        }
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
            ::close(fd);
            throw TransportError(TransportError::Kind::Connection,
                                 std::string("connect failed: ") + std::strerror(errno), id);
        }
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        try {
            write_frame(fd, json{{"type", "hello"},
                                 {"protocol_version", kProtocolVersion},
                                 {"customer_id", id}});
            const json ack = read_frame(fd, reply_timeout_, id);
            if (ack.value("type", "") == "error")
                throw TransportError(TransportError::Kind::Protocol,
                                     ack.value("message", "handshake rejected"), id);
            if (ack.value("type", "") != "hello_ack" || ack.value("customer_id", -1) != id)
                throw TransportError(TransportError::Kind::Protocol, "bad handshake reply", id);
        } catch (...) {
            ::close(fd);
            throw;
        }
        connections_.push_back({id, fd});
    }
}

TcpTransport::~TcpTransport() {
    for (const Connection& c : connections_) {
        try {
            write_frame(c.fd, json{{"type", "bye"}});
        } catch (const TransportError&) {
        }
        ::close(c.fd);
    }
}

std::vector<ConsumptionSchedule> TcpTransport::announce_and_collect(
    const std::vector<PriceVector>& batch) {
    const std::size_t candidates = batch.size();
    const std::uint64_t id_base = next_request_id_;
    next_request_id_ += candidates;

    // loads[meter][candidate]; filled per connection, then reduced in
    // ascending customer order so arrival order cannot matter.
    std::vector<std::vector<ConsumptionSchedule>> loads(
        connections_.size(), std::vector<ConsumptionSchedule>(candidates));

    parallel_for(connections_.size(), static_cast<int>(std::min<std::size_t>(connections_.size(), 16)),
                 [&](std::size_t ci) {
                     const Connection& conn = connections_[ci];
                     for (std::size_t i = 0; i < candidates; ++i) {
                         json announce{{"type", "announce"},
                                       {"request_id", id_base + i},
                                       {"prices", batch[i]}};
                         write_frame(conn.fd, announce);
                     }
                     std::vector<bool> seen(candidates, false);
                     for (std::size_t got = 0; got < candidates; ++got) {
                         const json msg = read_frame(conn.fd, reply_timeout_, conn.customer_id);
                         if (msg.value("type", "") == "error")
                             throw TransportError(TransportError::Kind::Protocol,
                                                  msg.value("message", "meter error"),
                                                  conn.customer_id);
                         ConsumptionReport report;
                         try {
                             report = report_from_json(msg);
                         } catch (const json::exception& e) {
                             throw TransportError(TransportError::Kind::Protocol,
                                                  std::string("malformed report: ") + e.what(),
                                                  conn.customer_id);
                         }
                         if (report.request_id < id_base || report.request_id >= id_base + candidates)
                             throw TransportError(TransportError::Kind::Protocol,
                                                  "reply for unknown request", conn.customer_id);
                         const std::size_t slot = static_cast<std::size_t>(report.request_id - id_base);
                         if (seen[slot])
                             throw TransportError(TransportError::Kind::Protocol,
                                                  "duplicate reply", conn.customer_id);
                         seen[slot] = true;
                         loads[ci][slot] = report.hourly_load;
                     }
                 });

    std::vector<ConsumptionSchedule> aggregates(candidates);
    for (std::size_t i = 0; i < candidates; ++i) {
        ConsumptionSchedule sum;
        for (std::size_t ci = 0; ci < connections_.size(); ++ci) sum += loads[ci][i];
        aggregates[i] = sum;
    }
    return aggregates;
}

}  // namespace gridlevel
