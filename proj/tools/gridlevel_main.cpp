// gridlevel: day-ahead pricing experiments over simulated smart-meter
// populations. Subcommands: gen, convergence, compare, bills, meters.
#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "gridlevel/experiments.hpp"
#include "gridlevel/json_io.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

struct TransportArgs {
    std::string transport = "inproc";
    std::string meters_addr = "127.0.0.1:9077";
    int timeout_ms = 30000;
    int threads = 0;
};

void add_transport_flags(CLI::App* cmd, TransportArgs& args) {
    cmd->add_option("--transport", args.transport, "inproc or tcp")
        ->check(CLI::IsMember({"inproc", "tcp"}));
    cmd->add_option("--meters-addr", args.meters_addr, "host:port of the meter host (tcp mode)");
    cmd->add_option("--timeout", args.timeout_ms, "per-reply timeout in milliseconds");
    cmd->add_option("--threads", args.threads, "evaluation threads (inproc mode, 0 = hardware)");
}

std::pair<std::string, std::uint16_t> parse_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--meters-addr", "expected host:port");
    return {addr.substr(0, colon),
            static_cast<std::uint16_t>(std::stoi(addr.substr(colon + 1)))};
}

gridlevel::ExperimentOptions make_options(const TransportArgs& args, const std::string& out_dir) {
    gridlevel::ExperimentOptions options;
    options.out_dir = out_dir;
    options.threads = args.threads;
    if (args.transport == "tcp") {
        const auto [host, port] = parse_addr(args.meters_addr);
        const auto timeout = std::chrono::milliseconds(args.timeout_ms);
        options.transport_factory = [host, port, timeout](
                                        const std::vector<gridlevel::HouseholdSpec>& households) {
            std::vector<int> ids;
            ids.reserve(households.size());
            for (const auto& h : households) ids.push_back(h.id);
            return std::make_unique<gridlevel::TcpTransport>(host, port, ids, timeout);
        };
    }
    return options;
}

void ensure_out_dir(const std::string& out_dir) {
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
}

void write_report(const gridlevel::ExperimentReport& report, const std::string& out_dir) {
    if (out_dir.empty()) return;
    nlohmann::json j{{"experiment", report.experiment},
                     {"scenario_hash", report.scenario_hash},
                     {"metrics", report.metrics},
                     {"artifacts", report.artifacts}};
    std::ofstream out(out_dir + "/report.json");
    out << j.dump(2) << '\n';
}

int check_scenario(const gridlevel::Scenario& scenario) {
    for (const auto& hh : scenario.customers) {
        const auto violations = gridlevel::validate_household(hh);
        if (!violations.empty()) {
            std::cerr << "infeasible scenario: customer " << hh.id << ": "
                      << violations.front().code << " (" << violations.front().detail << ")\n";
            return 2;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace gridlevel;

    CLI::App app{"Day-ahead pricing engine: household scheduling agents and a "
                 "multi-population GA price search"};
    app.require_subcommand(1);

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "Generate a random customer scenario");
    int gen_customers = 100;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "scenario.json";
    double gen_revenue_cap = -1.0;
    int gen_generations = -1;
    gen->add_option("--customers", gen_customers, "number of households");
    gen->add_option("--seed", gen_seed, "master random seed");
    gen->add_option("--out", gen_out, "output scenario JSON path");
    gen->add_option("--revenue-cap", gen_revenue_cap, "revenue cap override in pence");
    gen->add_option("--generations", gen_generations, "GA generations override");

    // --- convergence ---
    auto* conv = app.add_subcommand("convergence", "Best-profit traces for multi- vs "
                                                   "single-population search");
    std::vector<int> conv_counts{100, 1000};
    std::uint64_t conv_seed = 1;
    std::string conv_out_dir = "out/convergence";
    int conv_generations = -1;
    TransportArgs conv_transport;
    conv->add_option("--counts", conv_counts, "customer counts to sweep");
    conv->add_option("--seed", conv_seed, "master random seed");
    conv->add_option("--out-dir", conv_out_dir, "artifact directory");
    conv->add_option("--generations", conv_generations, "GA generations override");
    add_transport_flags(conv, conv_transport);

    // --- compare ---
    auto* compare = app.add_subcommand("compare", "Day-ahead pricing against a flat tariff at "
                                                  "the same revenue target");
    std::string compare_scenario;
    double compare_target = 25500.0;
    std::string compare_out_dir = "out/compare";
    TransportArgs compare_transport;
    compare->add_option("--scenario", compare_scenario, "scenario JSON path")->required();
    compare->add_option("--revenue-target", compare_target, "revenue target in pence");
    compare->add_option("--out-dir", compare_out_dir, "artifact directory");
    add_transport_flags(compare, compare_transport);

    // --- bills ---
    auto* bills = app.add_subcommand("bills", "Daily bills of one customer over an imported "
                                              "price series");
    std::string bills_scenario;
    std::string bills_prices;
    int bills_customer = 1;
    std::string bills_out_dir = "out/bills";
    bills->add_option("--scenario", bills_scenario, "scenario JSON path")->required();
    bills->add_option("--prices", bills_prices, "CSV price series (date,hour,price_pence_per_kwh)")
        ->required();
    bills->add_option("--customer", bills_customer, "customer id to bill");
    bills->add_option("--out-dir", bills_out_dir, "artifact directory");

    // --- meters ---
    auto* meters = app.add_subcommand("meters", "Host the smart-meter population over TCP");
    std::string meters_scenario;
    std::string meters_bind = "127.0.0.1";
    int meters_port = 9077;
    meters->add_option("--scenario", meters_scenario, "scenario JSON path")->required();
    meters->add_option("--bind", meters_bind, "bind address");
    meters->add_option("--port", meters_port, "listen port (0 = ephemeral)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            ScenarioConfig config = default_config(gen_customers, gen_seed);
            if (gen_revenue_cap >= 0.0)
                config.retailer_constraints.revenue_cap = Money::from_pence(gen_revenue_cap);
            if (gen_generations >= 0) config.ga_params.max_generations = gen_generations;
            const Scenario scenario = generate_scenario(config);
            save_scenario(scenario, gen_out);
            std::cerr << "wrote " << gen_out << " (" << scenario.customers.size()
                      << " customers, " << scenario.resample_count << " resampled draws)\n";
            return 0;
        }

        if (*conv) {
            ensure_out_dir(conv_out_dir);
            ScenarioConfig config = default_config(100, conv_seed);
            if (conv_generations >= 0) config.ga_params.max_generations = conv_generations;
            const auto options = make_options(conv_transport, conv_out_dir);
            const ExperimentReport report = run_convergence(config, conv_counts, options);
            write_report(report, conv_out_dir);
            std::cout << report.metrics.dump(2) << '\n';
            return 0;
        }

        if (*compare) {
            const Scenario scenario = load_scenario(compare_scenario);
            if (const int rc = check_scenario(scenario)) return rc;
            ensure_out_dir(compare_out_dir);
            const auto options = make_options(compare_transport, compare_out_dir);
            CompareOutcome outcome;
            const ExperimentReport report =
                run_flat_vs_dayahead(scenario, Money::from_pence(compare_target), options, &outcome);
            write_report(report, compare_out_dir);
            std::cout << "arm        revenue      cost        profit  (pence)\n";
            std::cout << "dayahead   " << outcome.dayahead.revenue.to_string() << "  "
                      << outcome.dayahead.cost.to_string() << "  "
                      << outcome.dayahead.profit.to_string() << '\n';
            std::cout << "flat       " << outcome.flat.revenue.to_string() << "  "
                      << outcome.flat.cost.to_string() << "  " << outcome.flat.profit.to_string()
                      << '\n';
            if (outcome.flat_price_clipped)
                std::cerr << "note: flat price clipped to the allowed band; revenues differ from "
                             "the target\n";
            return 0;
        }

        if (*bills) {
            const Scenario scenario = load_scenario(bills_scenario);
            if (const int rc = check_scenario(scenario)) return rc;
            ensure_out_dir(bills_out_dir);
            ExperimentOptions options;
            options.out_dir = bills_out_dir;
            std::vector<DayBills> rows;
            const ExperimentReport report =
                run_monthly_bills(scenario, bills_prices, bills_customer, options, &rows);
            write_report(report, bills_out_dir);
            for (const DayBills& b : rows)
                std::cout << b.date << "  optimized " << b.optimized.to_string() << "  baseline "
                          << b.baseline.to_string() << '\n';
            return 0;
        }

        if (*meters) {
            const Scenario scenario = load_scenario(meters_scenario);
            if (const int rc = check_scenario(scenario)) return rc;
            MeterHost host(scenario.customers);
            const std::uint16_t port =
                host.start(meters_bind, static_cast<std::uint16_t>(meters_port));
            std::cout << "meters listening on " << meters_bind << ":" << port << " ("
                      << scenario.customers.size() << " customers)\n"
                      << std::flush;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            host.stop();
            return 0;
        }
    } catch (const SolveError& e) {
        std::cerr << "infeasible scenario: " << e.what() << '\n';
        return 2;
    } catch (const TransportError& e) {
        std::cerr << "transport failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
