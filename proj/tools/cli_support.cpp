#include "cli_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qrm::cli {

namespace {

double to_double(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw UsageError("not a finite number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string num(double v, int precision)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

nlohmann::ordered_json number(double v)
{
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

} // namespace

std::vector<double> parse_grid(const std::string& spec)
{
    if (spec.empty()) throw UsageError("empty grid");
    const auto parts = split(spec, ':');
    if (parts.size() == 3) {
        const double lo = to_double(parts[0]), hi = to_double(parts[1]);
        const double n = to_double(parts[2]);
        if (n < 1 || n != std::floor(n) || n > 1e7) throw UsageError("grid point count must be a positive integer: '" + spec + "'");
        const auto count = static_cast<std::size_t>(n);
        if (count == 1) return {lo};
        std::vector<double> g(count);
        for (std::size_t i = 0; i < count; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        g.back() = hi;
        return g;
    }
    if (parts.size() != 1) throw UsageError("grid must be 'v', 'a,b,...' or 'lo:hi:n': '" + spec + "'");
    std::vector<double> g;
    for (const auto& p : split(spec, ',')) g.push_back(to_double(p));
    return g;
}

void write_csv(std::ostream& os, const Table& t, int precision)
{
    std::vector<std::string> head(t.inputs);
    head.insert(head.end(), t.text.begin(), t.text.end());
    for (const Column& c : t.outputs) {
        if (c.complex) {
            head.push_back(c.name + "_re");
            head.push_back(c.name + "_im");
        } else {
            head.push_back(c.name);
        }
    }
    head.insert(head.end(), t.errors.begin(), t.errors.end());
    for (std::size_t i = 0; i < head.size(); ++i) os << (i ? "," : "") << head[i];
    os << '\n';
    for (const Row& r : t.rows) {
        std::vector<std::string> cells;
        for (double v : r.in) cells.push_back(num(v, precision));
        for (const auto& s : r.text) cells.push_back(csv_text(s));
        for (std::size_t k = 0; k < t.outputs.size(); ++k) {
            cells.push_back(num(r.out[k].real(), precision));
            if (t.outputs[k].complex) cells.push_back(num(r.out[k].imag(), precision));
        }
        for (double e : r.err) cells.push_back(num(e, 3));
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    }
}

void add_json(nlohmann::ordered_json& envelope, const Table& t)
{
    auto results = nlohmann::ordered_json::array();
    auto errors = nlohmann::ordered_json::array();
    for (const Row& r : t.rows) {
        nlohmann::ordered_json row = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < t.inputs.size(); ++k) {
            const double v = r.in[k];
            if (v == std::floor(v) && std::abs(v) < 9e15) row[t.inputs[k]] = static_cast<long long>(v);
            else row[t.inputs[k]] = number(v);
        }
        for (std::size_t k = 0; k < t.text.size(); ++k) row[t.text[k]] = r.text[k];
        for (std::size_t k = 0; k < t.outputs.size(); ++k) {
            if (t.outputs[k].complex)
                row[t.outputs[k].name] = {{"re", number(r.out[k].real())}, {"im", number(r.out[k].imag())}};
            else
                row[t.outputs[k].name] = number(r.out[k].real());
        }
        results.push_back(std::move(row));
        nlohmann::ordered_json err = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < t.errors.size(); ++k) err[t.errors[k]] = number(r.err[k]);
        errors.push_back(std::move(err));
    }
    envelope["results"] = std::move(results);
    envelope["error_estimates"] = std::move(errors);
}

std::vector<std::string> expand_config(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return rest;

    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");

    std::vector<std::string> flags;
    auto value = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_array()) {
            std::string s;
            for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
            return s;
        }
        if (v.is_number() || v.is_boolean()) return v.dump();
        throw UsageError("config values must be numbers, strings or lists");
    };
    auto flag = [](std::string key) {
        std::replace(key.begin(), key.end(), '_', '-');
        return "--" + key;
    };
    auto emit = [&](const std::string& f, const nlohmann::json& v) {
        if (v.is_boolean()) {
            if (v.get<bool>()) flags.push_back(f);
            return;
        }
        flags.push_back(f);
        flags.push_back(value(v));
    };
    for (const auto& [section, body] : cfg.items()) {
        if (!body.is_object()) throw UsageError("config section '" + section + "' must be an object");
        for (const auto& [key, v] : body.items()) {
            if (section == "model" || section == "inputs") {
                emit(flag(key), v);
            } else if (section == "numerics") {
                if (key == "contour") {
                    for (const auto& [ck, cv] : v.items()) {
                        if (ck == "r") emit("--contour-r", cv);
                        else if (ck == "W") emit("--contour-w", cv);
                        else emit(flag(ck), cv);
                    }
                } else {
                    emit(flag(key), v);
                }
            } else if (section == "output") {
                emit(key == "path" ? std::string("--out") : flag(key), v);
            } else {
                throw UsageError("unknown config section '" + section + "'");
            }
        }
    }
    // Flags go right after the subcommand (the first argument not starting with '-').
    auto sub = std::find_if(rest.begin() + 1, rest.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
    if (sub == rest.end()) throw UsageError("a subcommand is required");
    rest.insert(sub + 1, flags.begin(), flags.end());
    return rest;
}

} // namespace qrm::cli
