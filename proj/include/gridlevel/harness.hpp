#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gridlevel/domain.hpp"
#include "gridlevel/hems.hpp"

namespace gridlevel {

inline constexpr int kProtocolVersion = 1;

/// One candidate price vector pushed to the meters.
struct PriceAnnouncement {
    std::uint64_t request_id = 0;
    PriceVector prices;
};

/// A meter's answer: aggregate hourly consumption and the bill, nothing
/// appliance-level.
struct ConsumptionReport {
    std::uint64_t request_id = 0;
    int customer_id = 0;
    ConsumptionSchedule hourly_load;
    Money bill;
};

/// The smart-meter side: solves the household problem for the announced
/// prices. Stateless; identical announcements give identical reports.
ConsumptionReport serve_meter(const HouseholdSpec& household,
                              const PriceAnnouncement& announcement);

class TransportError : public std::runtime_error {
public:
    enum class Kind { Timeout, Protocol, Connection };

    TransportError(Kind kind, std::string message, std::optional<int> customer_id = {})
        : std::runtime_error(std::move(message)), kind(kind), customer_id(customer_id) {}

    Kind kind;
    std::optional<int> customer_id;
};

/// Announces each candidate price vector to every meter and returns the
/// per-candidate aggregate loads in input order. A failed or timed-out meter
/// fails the whole batch; no partial aggregates are returned.
class MeterTransport {
public:
    virtual ~MeterTransport() = default;
    virtual std::vector<ConsumptionSchedule> announce_and_collect(
        const std::vector<PriceVector>& batch) = 0;
};

/// Meters simulated as in-process calls; candidate evaluations run on a small
/// thread pool. Aggregation always sums households in ascending id order, so
/// results are independent of scheduling.
class InprocTransport : public MeterTransport {
public:
    explicit InprocTransport(std::vector<HouseholdSpec> households, int threads = 0);

    std::vector<ConsumptionSchedule> announce_and_collect(
        const std::vector<PriceVector>& batch) override;

private:
    std::vector<HouseholdSpec> households_;
    int threads_;
    std::uint64_t next_request_id_ = 0;
};

/// Hosts a population of meters behind one listening socket. Each connection
/// serves a single meter session: frames are 4-byte big-endian length plus a
/// UTF-8 JSON body.
class MeterHost {
public:
    explicit MeterHost(std::vector<HouseholdSpec> households);
    ~MeterHost();

    MeterHost(const MeterHost&) = delete;
    MeterHost& operator=(const MeterHost&) = delete;

    /// Binds and starts serving; port 0 picks an ephemeral port. Returns the
    /// bound port.
    std::uint16_t start(const std::string& bind_address, std::uint16_t port);
    void stop();

    /// Announcements answered so far (one per report).
    std::uint64_t announcements_served() const { return announcements_served_; }

private:
    void accept_loop();
    void serve_connection(int fd);

    std::vector<HouseholdSpec> households_;
    int listen_fd_ = -1;
    std::thread accept_thread_;
    std::vector<std::thread> sessions_;
    std::atomic<bool> running_{false};
    std::atomic<std::uint64_t> announcements_served_{0};
};

/// Retailer-side client: one framed-JSON connection per meter.
class TcpTransport : public MeterTransport {
public:
    TcpTransport(const std::string& host, std::uint16_t port, std::vector<int> customer_ids,
                 std::chrono::milliseconds reply_timeout = std::chrono::seconds(30));
    ~TcpTransport();

    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    std::vector<ConsumptionSchedule> announce_and_collect(
        const std::vector<PriceVector>& batch) override;

private:
    struct Connection {
        int customer_id;
        int fd;
    };

    std::vector<Connection> connections_;  // ascending customer id
    std::chrono::milliseconds reply_timeout_;
    std::uint64_t next_request_id_ = 0;
};

}  // namespace gridlevel
