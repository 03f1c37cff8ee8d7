#pragma once

#include <json.hpp>

#include <complex>
#include <cstddef>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qrm::cli {

// Bad flag values or combinations (exit code 2).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// "v", "a,b,c", or "lo:hi:n" (n equally spaced points, both ends included).
std::vector<double> parse_grid(const std::string& spec);

struct Column {
    std::string name;
    bool complex = false;   // written as name_re, name_im
};

struct Row {
    std::vector<double> in;
    std::vector<std::string> text;
    std::vector<std::complex<double>> out;
    std::vector<double> err;
};

// One row per evaluation point: input coordinates, text labels, outputs,
// then one error estimate per output.
struct Table {
    std::vector<std::string> inputs;
    std::vector<std::string> text;
    std::vector<Column> outputs;
    std::vector<std::string> errors;
    std::vector<Row> rows;
};

void write_csv(std::ostream& os, const Table& t, int precision);
// Fills results[] and error_estimates[] of the envelope.
void add_json(nlohmann::ordered_json& envelope, const Table& t);

// f(i) for i < n on a pool of threads; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += threads) f(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Replaces "--config PATH" by the flags it stands for, inserted right after
// the subcommand so that flags given on the command line win.  Config layout:
//   {"model": {"g", "delta"},
//    "numerics": {"tol", "lambda_cap", "nmax", "gl_max_dim", "qmc_max",
//                 "contour": {"r", "W", "ray_nodes", "circle_nodes"}, "oracle_m", "threads"},
//    "output": {"format", "path", "precision"},
//    "inputs": {any subcommand flag, e.g. "t": 0.8, "x": "0:1:11"}}
std::vector<std::string> expand_config(int argc, char** argv);

} // namespace qrm::cli
