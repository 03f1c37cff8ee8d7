#include "cli_support.hpp"

#include "qrm/errors.hpp"
#include "qrm/gfunction.hpp"
#include "qrm/kernel.hpp"
#include "qrm/omega.hpp"
#include "qrm/oracle.hpp"
#include "qrm/rabi_bernoulli.hpp"
#include "qrm/verify.hpp"
#include "qrm/zeta.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>

using namespace qrm;
using namespace qrm::cli;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* version = "1.0.0";

// Flags shared by every subcommand.  Zero means "module default".
struct Common {
    double g = 0.0;
    double delta = 0.0;
    double tol = 0.0;
    int lambda_cap = 0;
    int nmax = 0;
    int gl_max_dim = 0;
    std::size_t qmc_max = 0;
    double contour_r = 0.0;
    double contour_w = 0.0;
    int ray_nodes = 0;
    int circle_nodes = 0;
    int oracle_m = 0;
    unsigned threads = 0;
    std::string format = "csv";
    std::string out;
    int precision = 17;
    bool timing = false;

    ModelParams params() const { return ModelParams(g, delta); }

    KernelOptions kernel() const
    {
        KernelOptions o;
        if (tol > 0) o.tol = tol;
        if (lambda_cap > 0) o.lambda_cap = lambda_cap;
        if (gl_max_dim > 0) o.gl_max_dim = gl_max_dim;
        if (qmc_max > 0) o.qmc_max = qmc_max;
        return o;
    }

    OmegaOptions omega() const
    {
        OmegaOptions o;
        if (tol > 0) o.tol = tol;
        if (lambda_cap > 0) o.lambda_cap = lambda_cap;
        if (gl_max_dim > 0) o.gl_max_dim = gl_max_dim;
        if (qmc_max > 0) o.qmc_max = qmc_max;
        return o;
    }

    ZetaOptions zeta() const
    {
        ZetaOptions o;
        if (tol > 0) o.tol = tol;
        if (contour_r > 0) o.contour.r = contour_r;
        if (contour_w > 0) o.contour.W = contour_w;
        if (ray_nodes > 0) o.contour.ray_nodes = ray_nodes;
        if (circle_nodes > 0) o.contour.circle_nodes = circle_nodes;
        o.contour.validate();
        return o;
    }

    GOptions gopt() const
    {
        GOptions o;
        if (tol > 0) o.tol = tol;
        if (nmax > 0) o.nmax = nmax;
        return o;
    }

    json numerics() const
    {
        const KernelOptions k = kernel();
        const ZetaOptions z = zeta();
        const GOptions go = gopt();
        return json{{"tol", tol > 0 ? json(tol) : json("default")},
                    {"lambda_cap", k.lambda_cap},
                    {"nmax", go.nmax},
                    {"gl_max_dim", k.gl_max_dim},
                    {"qmc_max", k.qmc_max},
                    {"contour", {{"r", z.contour.r}, {"W", z.contour.W}, {"ray_nodes", z.contour.ray_nodes},
                                 {"circle_nodes", z.contour.circle_nodes}}},
                    {"oracle_m", oracle_m},
                    {"precision", precision}};
    }
};

Sector parse_sector(const std::string& s)
{
    if (s == "full") return Sector::Full;
    if (s == "plus") return Sector::Plus;
    return Sector::Minus;
}

Parity to_parity(Sector s)
{
    if (s == Sector::Full) throw UsageError("this command needs --parity plus or minus");
    return s == Sector::Plus ? Parity::Plus : Parity::Minus;
}

const char* sector_name(Sector s)
{
    return s == Sector::Full ? "full" : s == Sector::Plus ? "plus" : "minus";
}

// A command fills the table and any extra envelope fields.
struct Result {
    Table table;
    json extra = json::object();
    std::vector<std::string> lines;   // plain-text output (verify)
    int exit_code = 0;
};

// ---------------------------------------------------------------------------

struct KernelArgs {
    std::string x = "0", y = "0", parity = "full";
    double t = 0.0, t_imag = 0.0;
};

void kernel_like(const Common& c, const KernelArgs& a, bool rotated, Result& r)
{
    const ModelParams p = c.params();
    const Sector sector = parse_sector(a.parity);
    const auto xs = parse_grid(a.x), ys = parse_grid(a.y);
    if (rotated && a.t_imag != 0.0) throw UsageError("the propagator takes a real --t");
    const TimePoint tp = rotated ? TimePoint::propagator(a.t) : TimePoint::heat(cplx(a.t, a.t_imag));
    KernelOptions o = c.kernel();
    double radius = 0.0;
    for (double v : xs) radius = std::max(radius, std::abs(v));
    for (double v : ys) radius = std::max(radius, std::abs(v));
    o.radius = std::max(radius, 1e-3);
    const KernelEvaluator ev(tp, p, o);

    const bool oracle = c.oracle_m > 0 && !rotated && a.t_imag == 0.0;
    std::unique_ptr<SpectralOracle> orc;
    if (oracle)
        orc = std::make_unique<SpectralOracle>(sector == Sector::Full ? full_matrix(c.oracle_m, p)
                                                                     : parity_matrix(c.oracle_m, to_parity(sector), p));

    Table& t = r.table;
    t.inputs = {"x", "y"};
    const std::string base = rotated ? "U" : "K";
    const std::vector<std::string> names =
        sector == Sector::Full ? std::vector<std::string>{base + "_uu", base + "_ud", base + "_du", base + "_dd"}
                               : std::vector<std::string>{base + "_" + sector_name(sector)};
    for (const auto& n : names) t.outputs.push_back({n, true});
    if (oracle)
        for (const auto& n : names) t.outputs.push_back({"oracle_" + n, false});
    for (const auto& col : t.outputs) t.errors.push_back(col.name + "_err");

    t.rows.resize(xs.size() * ys.size());
    parallel_for(t.rows.size(), c.threads, [&](std::size_t i) {
        Row& row = t.rows[i];
        const double x = xs[i / ys.size()], y = ys[i % ys.size()];
        row.in = {x, y};
        if (sector == Sector::Full) {
            const KernelMatrix k = ev.full(x, y);
            for (int e = 0; e < 4; ++e) {
                row.out.push_back(k.entry[e]);
                row.err.push_back(k.tail_estimate[e]);
            }
        } else {
            const KernelScalar k = ev.parity(x, y, to_parity(sector));
            row.out.push_back(k.value);
            row.err.push_back(k.tail_estimate);
        }
        if (oracle) {
            const auto o4 = orc->heat_kernel(x, y, a.t);
            const double w = orc->truncation_weight(a.t);
            const int count = sector == Sector::Full ? 4 : 1;
            for (int e = 0; e < count; ++e) {
                row.out.emplace_back(o4[e], 0.0);
                row.err.push_back(w * std::abs(o4[e]));
            }
        }
    });
    r.extra["time"] = {{"re", a.t}, {"im", a.t_imag}};
}

// ---------------------------------------------------------------------------

struct EvolveArgs {
    double t = 0.0, L = 8.0, x0 = 1.0, p0 = 0.0, sigma = 1.0;
    int n = 201;
    std::string parity = "full", spin = "up";
};

void evolve_cmd(const Common& c, const EvolveArgs& a, Result& r)
{
    if (a.n < 3) throw UsageError("--n must be at least 3");
    if (!(a.L > 0.0) || !(a.sigma > 0.0)) throw UsageError("--L and --sigma must be positive");
    const Sector sector = parse_sector(a.parity);
    SampledState s;
    s.L = a.L;
    s.n = a.n;
    s.sector = sector;
    std::vector<cplx> packet(a.n);
    for (int i = 0; i < a.n; ++i) {
        const double x = s.x(i), d = (x - a.x0) / a.sigma;
        packet[i] = std::exp(cplx(-0.5 * d * d, a.p0 * x));
    }
    if (sector == Sector::Full) {
        const bool up = a.spin == "up";
        s.up = up ? packet : std::vector<cplx>(a.n, 0.0);
        s.down = up ? std::vector<cplx>(a.n, 0.0) : packet;
    } else {
        s.up = packet;
    }
    const double norm = s.norm();
    for (auto& v : s.up) v /= norm;
    for (auto& v : s.down) v /= norm;

    const EvolveResult res = evolve_state(s, a.t, c.params(), c.kernel());
    Table& t = r.table;
    t.inputs = {"x"};
    if (sector == Sector::Full) {
        t.outputs = {{"psi_up", true}, {"psi_down", true}};
        t.errors = {"psi_up_err", "psi_down_err"};
    } else {
        t.outputs = {{"psi", true}};
        t.errors = {"psi_err"};
    }
    // Unitarity defect as the error scale of every sample.
    for (int i = 0; i < a.n; ++i) {
        Row row;
        row.in = {s.x(i)};
        row.out.push_back(res.state.up[i]);
        if (sector == Sector::Full) row.out.push_back(res.state.down[i]);
        row.err.assign(row.out.size(), res.norm_drift);
        t.rows.push_back(std::move(row));
    }
    r.extra["norm"] = res.state.norm();
    r.extra["norm_drift"] = res.norm_drift;
}

// ---------------------------------------------------------------------------

struct PartitionArgs {
    std::string beta = "1", parity = "full";
};

void partition_cmd(const Common& c, const PartitionArgs& a, Result& r)
{
    const ModelParams p = c.params();
    const Sector sector = parse_sector(a.parity);
    const auto betas = parse_grid(a.beta);
    for (double b : betas)
        if (!(b > 0.0)) throw UsageError("--beta values must be positive");
    const OmegaOptions o = c.omega();
    std::unique_ptr<SpectralOracle> orc;
    if (c.oracle_m > 0)
        orc = std::make_unique<SpectralOracle>(sector == Sector::Full ? full_matrix(c.oracle_m, p)
                                                                     : parity_matrix(c.oracle_m, to_parity(sector), p));
    Table& t = r.table;
    t.inputs = {"beta"};
    t.outputs = {{"Z", false}};
    t.errors = {"Z_err"};
    if (orc) {
        t.outputs.push_back({"oracle_Z", false});
        t.errors.push_back("oracle_Z_err");
    }
    t.rows.resize(betas.size());
    parallel_for(betas.size(), c.threads, [&](std::size_t i) {
        Row& row = t.rows[i];
        const double b = betas[i];
        const PartitionValue z = partition_value(b, sector, p, o);
        row.in = {b};
        row.out = {z.value};
        row.err = {z.error};
        if (orc) {
            // Omitted eigenvalues lie above the last trusted one, spaced by about 1/2.
            const Spectrum& sp = orc->spec();
            const double last = sp.values[sp.trusted() - 1];
            const double spacing = sector == Sector::Full ? 0.5 : 1.0;
            row.out.emplace_back(orc->partition(b));
            row.err.push_back(std::exp(-b * last) / (1.0 - std::exp(-b * spacing)));
        }
    });
}

// ---------------------------------------------------------------------------

struct ZetaArgs {
    std::string s = "2", tau = "2", parity = "full", method = "auto";
    double s_imag = 0.0;
};

void zeta_cmd(const Common& c, const ZetaArgs& a, Result& r)
{
    const ModelParams p = c.params();
    const Sector sector = parse_sector(a.parity);
    const auto ss = parse_grid(a.s), taus = parse_grid(a.tau);
    const SpectralZeta z(p, sector, c.zeta());
    Table& t = r.table;
    t.inputs = {"s_re", "s_im", "tau"};
    t.outputs = {{"zeta", true}};
    t.errors = {"zeta_err"};
    t.rows.resize(ss.size() * taus.size());
    parallel_for(t.rows.size(), c.threads, [&](std::size_t i) {
        Row& row = t.rows[i];
        const cplx s(ss[i / taus.size()], a.s_imag);
        const double tau = taus[i % taus.size()];
        const bool integer = s.imag() == 0.0 && s.real() >= 2.0 && s.real() == std::floor(s.real());
        bool mellin = a.method == "mellin" || (a.method == "auto" && integer);
        if (a.method == "contour" && integer) mellin = true;   // Gamma(1 - s) pole
        const ZetaValue v = mellin ? z.mellin(s, tau) : z.contour(s, tau);
        row.in = {s.real(), s.imag(), tau};
        row.out = {v.value};
        row.err = {v.error};
    });
}

// ---------------------------------------------------------------------------

struct DetArgs {
    std::string tau = "2", parity = "full";
};

void det_cmd(const Common& c, const DetArgs& a, Result& r)
{
    const ModelParams p = c.params();
    const Sector sector = parse_sector(a.parity);
    const auto taus = parse_grid(a.tau);
    const double tol = c.tol > 0 ? c.tol : 1e-10;
    Table& t = r.table;
    t.inputs = {"tau"};
    t.outputs = {{"det", true}, {"log_det", true}};
    t.errors = {"det_err", "log_det_err"};
    t.rows.resize(taus.size());
    parallel_for(taus.size(), c.threads, [&](std::size_t i) {
        const Determinant d = spectral_determinant(taus[i], sector, p, tol);
        const double le = d.error + d.fd_discrepancy;
        t.rows[i] = Row{{taus[i]}, {}, {d.value, d.log_value}, {std::abs(d.value) * le, le}};
    });
}

// ---------------------------------------------------------------------------

struct RBArgs {
    int k = 0;
    std::string parity = "full";
};

void rb_cmd(const RBArgs& a, Result& r)
{
    const Sector sector = parse_sector(a.parity);
    RBOptions o;
    if (a.k < 0 || a.k > o.max_k) throw UsageError("--k must be in 0.." + std::to_string(o.max_k));
    const RBPoly rb = rb_polynomial(a.k, sector, o);
    Table& t = r.table;
    const std::string dname = sector == Sector::Full ? "delta2_exp" : "delta_exp";
    t.inputs = {"tau_exp", "g2_exp", dname};
    t.text = {"coefficient"};
    // Descending in tau, then g^2, then Delta.
    std::vector<std::pair<MultiPoly::Exponents, Rational>> terms(rb.poly.terms().begin(), rb.poly.terms().end());
    std::reverse(terms.begin(), terms.end());
    for (const auto& [e, coef] : terms)
        t.rows.push_back(Row{{double(e[TauVar]), double(e[GVar]), double(e[DVar])}, {to_string(coef)}, {}, {}});
    r.extra["k"] = a.k;
    r.extra["sector"] = sector_name(sector);
    r.extra["variables"] = sector == Sector::Full ? json::array({"tau", "g^2", "Delta^2"}) : json::array({"tau", "g^2", "Delta"});
    r.extra["polynomial"] = rb.to_string();
}

// ---------------------------------------------------------------------------

struct GArgs {
    std::string x = "0.5", n = "0", parity = "plus", kind = "g";
};

void gfunc_cmd(const Common& c, const GArgs& a, Result& r)
{
    const ModelParams p = c.params();
    if (!(p.g > 0.0)) throw UsageError("G-functions need --g > 0");
    const Parity par = to_parity(parse_sector(a.parity));
    const GOptions o = c.gopt();
    GOptions twice = o;
    twice.nmax = 2 * o.nmax;
    const bool by_x = a.kind == "g" || a.kind == "complete";
    const auto pts = parse_grid(by_x ? a.x : a.n);
    if (!by_x)
        for (double v : pts)
            if (v < 0 || v != std::floor(v)) throw UsageError("--n values must be nonnegative integers");
    Table& t = r.table;
    t.inputs = {by_x ? "x" : "N"};
    t.outputs = {{a.kind, false}};
    t.errors = {a.kind + "_err"};
    if (a.kind == "g") t.text = {"ill_conditioned"};
    t.rows.resize(pts.size());
    parallel_for(pts.size(), c.threads, [&](std::size_t i) {
        const double x = pts[i];
        const int N = static_cast<int>(x);
        auto eval = [&](const GOptions& go) -> double {
            if (a.kind == "g") return g_function(x, par, p, go);
            if (a.kind == "complete") return complete_g(x, par, p, go);
            if (a.kind == "exceptional") return g_exceptional(N, par, p, go);
            if (a.kind == "residue") return residue_at(N, par, p, go);
            return constraint_K(N, p);
        };
        const double v = eval(o);
        // Truncation: change under doubled nmax; rounding: a few ulps per recursion step.
        double err = std::abs(v) * std::numeric_limits<double>::epsilon() * (by_x ? 1.0 : N + 1.0);
        if (a.kind != "constraint") err += std::abs(eval(twice) - v);
        Row row{{x}, {}, {v}, {err}};
        if (a.kind == "g") row.text = {g_function_value(x, par, p, o).ill_conditioned ? "true" : "false"};
        t.rows[i] = std::move(row);
    });
}

// ---------------------------------------------------------------------------

struct EigsArgs {
    double lo = -1.0, hi = 10.0, step = 0.02, root_tol = 1e-10;
    std::string parity = "full";
};

void eigs_cmd(const Common& c, const EigsArgs& a, Result& r)
{
    const ModelParams p = c.params();
    if (!(p.g > 0.0)) throw UsageError("eigenvalue search needs --g > 0");
    if (!(a.hi > a.lo)) throw UsageError("--hi must exceed --lo");
    const Sector sector = parse_sector(a.parity);
    EigenSearch s;
    s.x_lo = a.lo + p.g * p.g;
    s.x_hi = a.hi + p.g * p.g;
    s.grid_step = a.step;
    s.tol = a.root_tol;
    s.threads = static_cast<int>(c.threads);
    std::vector<EigenvalueRecord> all;
    for (Parity par : {Parity::Plus, Parity::Minus}) {
        if (sector == Sector::Plus && par == Parity::Minus) continue;
        if (sector == Sector::Minus && par == Parity::Plus) continue;
        auto v = find_eigenvalues(par, p, s, c.gopt());
        all.insert(all.end(), v.begin(), v.end());
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& u, const auto& v) { return u.lambda < v.lambda; });

    // Oracle spectra at M and M/2; their difference is the oracle error estimate.
    std::map<Parity, std::pair<Spectrum, Spectrum>> orc;
    if (c.oracle_m > 0)
        for (Parity par : {Parity::Plus, Parity::Minus})
            orc[par] = {spectrum(parity_matrix(c.oracle_m, par, p)), spectrum(parity_matrix(std::max(2, c.oracle_m / 2), par, p))};
    auto nearest = [](const Spectrum& sp, double v) {
        double best = sp.values[0];
        for (std::size_t j = 0; j < sp.trusted(); ++j)
            if (std::abs(sp.values[j] - v) < std::abs(best - v)) best = sp.values[j];
        return best;
    };

    Table& t = r.table;
    t.inputs = {"index"};
    t.text = {"parity", "class"};
    t.outputs = {{"lambda", false}, {"x", false}};
    t.errors = {"lambda_err", "x_err"};
    if (!orc.empty()) {
        t.outputs.push_back({"oracle_lambda", false});
        t.errors.push_back("oracle_lambda_err");
    }
    t.errors.push_back("residual");
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& e = all[i];
        Row row{{double(i)}, {e.parity == Parity::Plus ? "plus" : "minus", to_string(e.classification)}, {e.lambda, e.x},
                {0.5 * a.root_tol, 0.5 * a.root_tol}};
        if (!orc.empty()) {
            const auto& [big, small] = orc.at(e.parity);
            const double o = nearest(big, e.lambda);
            row.out.emplace_back(o);
            row.err.push_back(std::abs(o - nearest(small, o)));
        }
        row.err.push_back(e.residual);
        t.rows.push_back(std::move(row));
    }
}

// ---------------------------------------------------------------------------

std::vector<int> parse_suite(const std::string& s)
{
    if (s == "all") return {};
    std::vector<int> ids;
    for (double v : parse_grid(s)) {
        bool known = false;
        for (const auto& [id, title] : acceptance_criteria()) known = known || id == v;
        if (!known) throw UsageError("unknown criterion in '" + s + "'");
        ids.push_back(static_cast<int>(v));
    }
    return ids;
}

void verify_cmd(const Common& c, const std::string& suite, Result& r)
{
    const auto ids = parse_suite(suite);
    const bool stream = c.format == "table" && c.out.empty();
    std::vector<CriterionResult> res = run_suite(ids, [&](const CriterionResult& cr) {
        if (stream) std::cout << format_result(cr) << std::endl;
    });
    Table& t = r.table;
    t.inputs = {"id"};
    t.text = {"title", "status", "detail"};
    int failed = 0;
    for (const auto& cr : res) {
        failed += cr.pass ? 0 : 1;
        t.rows.push_back(Row{{double(cr.id)}, {cr.title, cr.pass ? "PASS" : "FAIL", cr.detail}, {}, {}});
        if (!stream) r.lines.push_back(format_result(cr));
    }
    const std::string summary = std::to_string(res.size() - failed) + "/" + std::to_string(res.size()) + " criteria passed";
    if (stream) std::cout << summary << std::endl;
    else r.lines.push_back(summary);
    r.extra["passed"] = res.size() - failed;
    r.extra["failed"] = failed;
    r.exit_code = failed ? 1 : 0;
}

// ---------------------------------------------------------------------------

std::string quote(const std::string& s)
{
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') q += '\\';
        q += ch == '\n' ? ' ' : ch;
    }
    return q + "\"";
}

int fail(const char* kind, const std::string& command, const std::string& message, int code)
{
    std::cerr << "qrm: error kind=" << kind << " command=" << (command.empty() ? "-" : command)
              << " message=" << quote(message) << std::endl;
    return code;
}

void add_common(CLI::App* sub, Common& c, bool model = true)
{
    if (model) {
        sub->add_option("--g", c.g, "coupling g >= 0")->check(CLI::NonNegativeNumber);
        sub->add_option("--delta", c.delta, "level splitting Delta >= 0")->check(CLI::NonNegativeNumber);
        sub->add_option("--tol", c.tol, "relative tolerance (0: module default)")->check(CLI::NonNegativeNumber);
        sub->add_option("--lambda-cap", c.lambda_cap, "largest simplex dimension")->check(CLI::PositiveNumber);
        sub->add_option("--nmax", c.nmax, "G-function series cap")->check(CLI::PositiveNumber);
        sub->add_option("--gl-max-dim", c.gl_max_dim, "Gauss-Legendre up to this dimension")->check(CLI::Range(1, 12));
        sub->add_option("--qmc-max", c.qmc_max, "largest QMC point count")->check(CLI::PositiveNumber);
        sub->add_option("--contour-r", c.contour_r, "Hankel circle radius, 0 < r < pi")->check(CLI::NonNegativeNumber);
        sub->add_option("--contour-w", c.contour_w, "ray truncation (0: automatic)")->check(CLI::NonNegativeNumber);
        sub->add_option("--ray-nodes", c.ray_nodes, "nodes per ray")->check(CLI::PositiveNumber);
        sub->add_option("--circle-nodes", c.circle_nodes, "nodes on the circle")->check(CLI::PositiveNumber);
        sub->add_option("--oracle-m", c.oracle_m, "add truncated-Fock columns with M levels")->check(CLI::Range(0, 2000));
    }
    sub->add_option("--threads", c.threads, "worker threads (0: all cores)");
    sub->add_option("--out", c.out, "write to PATH instead of stdout");
    sub->add_option("--precision", c.precision, "significant digits in CSV")->check(CLI::Range(1, 17));
    sub->add_flag("--timing", c.timing, "report runtime_ms (otherwise null, keeping output reproducible)");
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const UsageError& e) {
        return fail("invalid-argument", "", e.what(), 2);
    }

    CLI::App app("Quantum Rabi model: heat kernel, propagator, partition and zeta functions, G-functions", "qrm");
    app.set_version_flag("--version", version);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Common c;
    KernelArgs ka, pa;
    EvolveArgs ea;
    PartitionArgs za;
    ZetaArgs zs;
    DetArgs da;
    RBArgs ra;
    GArgs ga;
    EigsArgs ia;
    std::string suite = "all";
    const std::vector<std::string> sectors{"plus", "minus", "full"};
    const std::vector<std::string> formats{"csv", "json"};

    auto* kernel = app.add_subcommand("kernel", "heat kernel K(x, y, t) on a grid");
    kernel->add_option("--x", ka.x, "x grid")->capture_default_str();
    kernel->add_option("--y", ka.y, "y grid")->capture_default_str();
    kernel->add_option("--t", ka.t, "time (real part)")->required();
    kernel->add_option("--t-imag", ka.t_imag, "imaginary part of t");
    kernel->add_option("--parity", ka.parity)->check(CLI::IsMember(sectors))->capture_default_str();

    auto* prop = app.add_subcommand("propagator", "propagator U(x, y, t) on a grid");
    prop->add_option("--x", pa.x, "x grid")->capture_default_str();
    prop->add_option("--y", pa.y, "y grid")->capture_default_str();
    prop->add_option("--t", pa.t, "real time, not in pi Z")->required();
    prop->add_option("--parity", pa.parity)->check(CLI::IsMember(sectors))->capture_default_str();

    auto* evolve = app.add_subcommand("evolve", "evolve a Gaussian wavepacket with the propagator");
    evolve->add_option("--t", ea.t, "real time")->required();
    evolve->add_option("--L", ea.L, "grid half-width")->capture_default_str();
    evolve->add_option("--n", ea.n, "grid points")->capture_default_str();
    evolve->add_option("--x0", ea.x0, "packet centre")->capture_default_str();
    evolve->add_option("--p0", ea.p0, "packet momentum")->capture_default_str();
    evolve->add_option("--sigma", ea.sigma, "packet width")->capture_default_str();
    evolve->add_option("--spin", ea.spin, "initial spin (full sector)")->check(CLI::IsMember({"up", "down"}));
    evolve->add_option("--parity", ea.parity)->check(CLI::IsMember(sectors))->capture_default_str();

    auto* part = app.add_subcommand("partition", "partition functions Z(beta)");
    part->add_option("--beta", za.beta, "beta grid")->capture_default_str();
    part->add_option("--parity", za.parity)->check(CLI::IsMember(sectors))->capture_default_str();

    auto* zeta = app.add_subcommand("zeta", "spectral zeta function zeta(s; tau)");
    zeta->add_option("--s", zs.s, "grid of Re s")->capture_default_str();
    zeta->add_option("--s-imag", zs.s_imag, "Im s");
    zeta->add_option("--tau", zs.tau, "tau grid, tau > g^2 + Delta")->capture_default_str();
    zeta->add_option("--parity", zs.parity)->check(CLI::IsMember(sectors))->capture_default_str();
    zeta->add_option("--method", zs.method)->check(CLI::IsMember({"auto", "contour", "mellin"}))->capture_default_str();

    auto* det = app.add_subcommand("det", "zeta-regularized determinant det(tau + H)");
    det->add_option("--tau", da.tau, "tau grid, tau > g^2 + Delta")->capture_default_str();
    det->add_option("--parity", da.parity)->check(CLI::IsMember(sectors))->capture_default_str();

    auto* rb = app.add_subcommand("rb", "exact Rabi-Bernoulli polynomial");
    rb->add_option("--k", ra.k, "degree")->required();
    rb->add_option("--parity", ra.parity)->check(CLI::IsMember(sectors))->capture_default_str();

    auto* gfunc = app.add_subcommand("gfunc", "G-functions, constraint polynomials and residues");
    gfunc->add_option("--kind", ga.kind)
        ->check(CLI::IsMember({"g", "complete", "constraint", "exceptional", "residue"}))
        ->capture_default_str();
    gfunc->add_option("--x", ga.x, "x grid (kinds g, complete)")->capture_default_str();
    gfunc->add_option("--n", ga.n, "integer grid N (other kinds)")->capture_default_str();
    gfunc->add_option("--parity", ga.parity)->check(CLI::IsMember({"plus", "minus"}))->capture_default_str();

    auto* eigs = app.add_subcommand("eigs", "eigenvalues from the zeros of the complete G-functions");
    eigs->add_option("--lo", ia.lo, "lower end of the lambda window")->capture_default_str();
    eigs->add_option("--hi", ia.hi, "upper end of the lambda window")->capture_default_str();
    eigs->add_option("--step", ia.step, "scan step in x")->check(CLI::PositiveNumber)->capture_default_str();
    eigs->add_option("--root-tol", ia.root_tol, "bracket width")->check(CLI::PositiveNumber)->capture_default_str();
    eigs->add_option("--parity", ia.parity)->check(CLI::IsMember(sectors))->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    verify->add_option("--suite", suite, "'all' or a list of criterion ids")->capture_default_str();

    for (auto* sub : {kernel, prop, evolve, part, zeta, det, rb, gfunc, eigs}) {
        add_common(sub, c);
        sub->add_option("--format", c.format)->check(CLI::IsMember(formats))->capture_default_str();
    }
    add_common(verify, c, false);
    verify->add_option("--format", c.format)->check(CLI::IsMember({"table", "csv", "json"}));

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("invalid-argument", "", e.what(), 2);
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "verify" && verify->count("--format") == 0) c.format = "table";

    Result r;
    const auto start = std::chrono::steady_clock::now();
    try {
        if (name == "kernel") kernel_like(c, ka, false, r);
        else if (name == "propagator") kernel_like(c, pa, true, r);
        else if (name == "evolve") evolve_cmd(c, ea, r);
        else if (name == "partition") partition_cmd(c, za, r);
        else if (name == "zeta") zeta_cmd(c, zs, r);
        else if (name == "det") det_cmd(c, da, r);
        else if (name == "rb") rb_cmd(ra, r);
        else if (name == "gfunc") gfunc_cmd(c, ga, r);
        else if (name == "eigs") eigs_cmd(c, ia, r);
        else verify_cmd(c, suite, r);
    } catch (const UsageError& e) {
        return fail("invalid-argument", name, e.what(), 2);
    } catch (const DomainError& e) {
        return fail("domain", name, e.what(), 3);
    } catch (const ConvergenceError& e) {
        return fail("convergence", name, e.what(), 4);
    } catch (const std::exception& e) {
        return fail("internal", name, e.what(), 1);
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    std::ofstream file;
    if (!c.out.empty()) {
        file.open(c.out);
        if (!file) return fail("invalid-argument", name, "cannot write '" + c.out + "'", 2);
    }
    std::ostream& os = c.out.empty() ? std::cout : file;

    json env;
    env["command"] = name;
    json params = json::object();
    if (name != "verify" && name != "rb") {
        params["g"] = c.g;
        params["delta"] = c.delta;
    }
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string on = opt->get_name(false, true);
        if (opt->count() == 0 || on == "--g" || on == "--delta" || on == "--help" || on == "-h") continue;
        params[on.substr(2)] = opt->as<std::string>();
    }
    env["params"] = std::move(params);
    env["numerics"] = name == "verify" ? json::object() : c.numerics();
    for (auto& [k, v] : r.extra.items()) env[k] = v;
    add_json(env, r.table);
    env["runtime_ms"] = c.timing ? json(ms) : json(nullptr);
    env["version"] = version;

    if (c.format == "json") {
        os << env.dump(2) << '\n';
    } else if (c.format == "table") {
        for (const auto& l : r.lines) os << l << '\n';
    } else {
        write_csv(os, r.table, c.precision);
        if (!c.out.empty()) {
            std::ofstream meta(c.out + ".json");
            meta << env.dump(2) << '\n';
        }
    }
    return r.exit_code;
}
