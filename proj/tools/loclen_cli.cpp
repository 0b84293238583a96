// loclen: command-line front end for the limiting-density library.
//
//   loclen <command> [--config FILE] [--out PATH] [options]
//
// Config files hold `key = value` lines (`#` starts a comment); keys are the
// long option names of the command. Flags given on the command line win.

#include "validation.hpp"

#include "loclen/error.hpp"
#include "loclen/limiting_density.hpp"
#include "loclen/monte_carlo.hpp"
#include "loclen/polymer.hpp"
#include "loclen/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace loclen;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitConvergence = 5;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string num(std::uint64_t v) { return std::to_string(v); }

std::vector<double> parse_list(const std::string& s, const char* name) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        double v = 0.0;
        const char* first = item.data() + b;
        const char* last = item.data() + e + 1;
        const auto r = std::from_chars(first, last, v);
        if (r.ec != std::errc() || r.ptr != last) throw UsageError(std::string("--") + name + ": not a number: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(std::string("--") + name + ": empty list");
    return out;
}

// Reads `key = value` lines into `--key=value` tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    std::vector<std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto i = s.find_first_not_of(" \t\r");
            const auto j = s.find_last_not_of(" \t\r");
            return i == std::string::npos ? std::string() : s.substr(i, j - i + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config")
            throw UsageError(path + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
        out.push_back("--" + key + "=" + value);
    }
    return out;
}

struct Common {
    std::string config;
    std::string out = "-";
    std::string summary;
};

struct Context {
    std::string command;
    CLI::App* app = nullptr;
    Common common;
};

// Effective option values as text, in declaration order.
std::vector<std::pair<std::string, std::string>> config_strings(const Context& ctx) {
    std::vector<std::pair<std::string, std::string>> out{{"command", ctx.command}};
    for (const CLI::Option* opt : ctx.app->get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config" || name == "out" || name == "summary") continue;
        if (opt->get_expected_max() == 0)
            out.emplace_back(name, opt->count() > 0 && opt->as<bool>() ? "true" : "false");
        else
            out.emplace_back(name, opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str());
    }
    return out;
}

json typed(const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    std::int64_t i = 0;
    if (auto r = std::from_chars(first, last, i); r.ec == std::errc() && r.ptr == last) return i;
    double d = 0.0;
    if (auto r = std::from_chars(first, last, d); r.ec == std::errc() && r.ptr == last) return d;
    return v;
}

json effective_config(const Context& ctx) {
    json cfg;
    for (const auto& [k, v] : config_strings(ctx)) cfg[k] = typed(v);
    return cfg;
}

class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path != "-") {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw UsageError("cannot write " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void write_json(const Context& ctx, const std::string& path, json body) {
    json doc;
    doc["version"] = std::string("loclen ") + kVersion;
    doc["config"] = effective_config(ctx);
    for (auto& [k, v] : body.items()) doc[k] = v;
    Sink s(path);
    s.os() << doc.dump(2) << '\n';
}

// CSV artifact with the version and effective config as leading comment lines.
class CsvWriter {
public:
    CsvWriter(const Context& ctx, const std::vector<std::string>& header) : sink_(ctx.common.out) {
        std::ostream& os = sink_.os();
        os << "# loclen " << kVersion << '\n';
        for (const auto& [k, v] : config_strings(ctx)) os << "# " << k << " = " << v << '\n';
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        std::ostream& os = sink_.os();
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    }

private:
    Sink sink_;
};

void write_summary(const Context& ctx, json body) {
    std::string path = ctx.common.summary;
    if (path.empty()) path = ctx.common.out == "-" ? std::string() : ctx.common.out + ".json";
    if (path.empty()) {
        json doc;
        doc["version"] = std::string("loclen ") + kVersion;
        doc["config"] = effective_config(ctx);
        for (auto& [k, v] : body.items()) doc[k] = v;
        std::cerr << doc.dump(2) << '\n';
        return;
    }
    write_json(ctx, path, std::move(body));
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "key = value configuration file");
    sub->add_option("--out", c.out, "output artifact path, '-' for stdout");
    sub->add_option("--summary", c.summary, "JSON summary path for CSV commands (default: <out>.json)");
}

struct CubatureFlags {
    density::CubatureConfig cfg;
    std::string theta_method = "steepest";

    void add(CLI::App* sub) {
        sub->add_option("--rel-tol", cfg.rel_tol, "relative tolerance of the kernel quadratures");
        sub->add_option("--abs-tol", cfg.abs_tol, "absolute tolerance of the kernel quadratures");
        sub->add_option("--max-subdivisions", cfg.max_subdivisions, "adaptive subdivision budget");
        sub->add_option("--w-max-margin", cfg.w_max_margin, "log-scale truncation headroom");
        sub->add_option("--min-t", cfg.min_t, "smallest admissible t");
        sub->add_flag("--extended-precision", cfg.extended_precision, "multiprecision panels (panels method only)");
        sub->add_option("--theta-method", theta_method, "steepest | panels")
            ->check(CLI::IsMember({"steepest", "panels"}));
        sub->add_option("--bound-constant", cfg.bound_constant, "envelope constant C");
        sub->add_option("--outer-rel-tol", cfg.outer_rel_tol, "relative tolerance of the outer integral");
        sub->add_option("--y-window-sigmas", cfg.y_window_sigmas, "y window cap in standard deviations");
        sub->add_option("--zeta-step", cfg.zeta_step, "trapezoid step in log z");
    }
    const density::CubatureConfig& get() {
        cfg.theta_method = theta_method == "panels" ? kernels::ThetaMethod::OscillatoryPanels
                                                    : kernels::ThetaMethod::SteepestDescent;
        cfg.validate();
        return cfg;
    }
};

struct SeedFlags {
    std::uint64_t seed = 1;
    unsigned threads = 0;
    CLI::Option* seed_opt = nullptr;

    void add(CLI::App* sub) {
        seed_opt = sub->add_option("--seed", seed, "stream id of the root seed (env LOCLEN_SEED when absent)");
        sub->add_option("--threads", threads, "worker threads, 0 = all cores");
    }
    Seed get() {
        if (seed_opt->count() == 0) {
            if (const char* env = std::getenv("LOCLEN_SEED")) {
                const std::string s(env);
                const auto r = std::from_chars(s.data(), s.data() + s.size(), seed);
                if (r.ec != std::errc() || r.ptr != s.data() + s.size())
                    throw UsageError("LOCLEN_SEED is not an unsigned integer: " + s);
                seed_opt->default_str(s);
            }
        }
        return Seed{seed, 0};
    }
    mc::RunOptions run() const { return mc::RunOptions{threads}; }
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

void emit_curve(const Context& ctx, const mc::CurveEstimate& c) {
    CsvWriter w(ctx, {"x", "value", "std_error", "n"});
    for (std::size_t i = 0; i < c.xs.size(); ++i) w.row({num(c.xs[i]), num(c.values[i]), num(c.std_errors[i]), num(c.n_samples)});
}

json curve_summary(const mc::CurveEstimate& c) {
    json j;
    j["n_samples"] = c.n_samples;
    j["grid_step"] = c.grid_step;
    json unreliable = json::array();
    for (std::size_t i = 0; i < c.xs.size(); ++i)
        if (c.unreliable[i]) unreliable.push_back(c.xs[i]);
    j["unreliable_x"] = unreliable;
    return j;
}

void emit_rows(const Context& ctx, const std::vector<cli::CheckRow>& rows, bool with_verdict) {
    std::vector<std::string> header{"function", "args", "value", "est_error", "oracle", "abs_diff"};
    if (with_verdict) {
        header.push_back("tolerance");
        header.push_back("pass");
    }
    CsvWriter w(ctx, header);
    for (const auto& r : rows) {
        std::vector<std::string> cells{r.function, r.args, num(r.value), num(r.est_error), num(r.oracle), num(r.abs_diff())};
        if (with_verdict) {
            cells.push_back(num(r.tolerance));
            cells.push_back(r.pass() ? "true" : "false");
        }
        w.row(cells);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("loclen ") + kVersion + ": localization length of the continuum directed polymer"};
    app.name("loclen");
    app.set_version_flag("--version", std::string("loclen ") + kVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Context ctx;
    std::function<int()> action;
    auto command = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, ctx.common);
        return sub;
    };

    // gdensity
    CubatureFlags gd_cub;
    double gd_xmin = 0.5, gd_xmax = 20.0;
    int gd_points = 40;
    std::string gd_spacing = "linear";
    {
        CLI::App* sub = command("gdensity", "limiting density g_inf on a grid (CSV x,g_infinity,est_error,method)");
        sub->add_option("--xmin", gd_xmin);
        sub->add_option("--xmax", gd_xmax);
        sub->add_option("--points", gd_points);
        sub->add_option("--spacing", gd_spacing)->check(CLI::IsMember({"linear", "log"}));
        gd_cub.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"gdensity", sub, ctx.common};
            action = [&] {
                require(gd_xmin < gd_xmax, "gdensity: need xmin<xmax");
                require(gd_points >= 2, "gdensity: need points>=2");
                require(gd_spacing == "linear" || gd_xmin > 0.0, "gdensity: log spacing needs xmin>0");
                const density::CubatureConfig& cfg = gd_cub.get();
                std::vector<density::DensityPoint> pts;
                for (int i = 0; i < gd_points; ++i) {
                    const double f = static_cast<double>(i) / (gd_points - 1);
                    const double x = gd_spacing == "log" ? gd_xmin * std::pow(gd_xmax / gd_xmin, f)
                                                         : gd_xmin + f * (gd_xmax - gd_xmin);
                    pts.push_back(density::g_infinity(x, cfg));
                }
                CsvWriter w(ctx, {"x", "g_infinity", "est_error", "method"});
                for (const auto& p : pts)
                    w.row({num(p.x), num(p.value), num(p.est_error),
                           p.method == density::Method::Analytic ? "analytic" : "monte_carlo"});
                return 0;
            };
        });
    }

    // lambda
    CubatureFlags la_cub;
    {
        CLI::App* sub = command("lambda", "tail constant lambda (JSON {value, est_error})");
        la_cub.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"lambda", sub, ctx.common};
            action = [&] {
                const density::DensityPoint p = density::lambda_const(la_cub.get());
                write_json(ctx, ctx.common.out, json{{"value", p.value}, {"est_error", p.est_error}});
                return 0;
            };
        });
    }

    // twopoint
    CubatureFlags tp_cub;
    double tp_L = 8.0, tp_x = 2.0;
    {
        CLI::App* sub = command("twopoint", "E rho_L(0) rho_L(x) (JSON {value, est_error})");
        sub->add_option("--L", tp_L);
        sub->add_option("--x", tp_x);
        tp_cub.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"twopoint", sub, ctx.common};
            action = [&] {
                require(tp_L > 0.0, "twopoint: need L>0");
                require(tp_x > 0.0 && tp_x < tp_L, "twopoint: need 0<x<L");
                const density::DensityPoint p = density::two_point_L(tp_L, tp_x, tp_cub.get());
                write_json(ctx, ctx.common.out, json{{"value", p.value}, {"est_error", p.est_error}});
                return 0;
            };
        });
    }

    // Monte Carlo commands share n, delta, seed and threads.
    struct McFlags {
        std::uint64_t n = 100000;
        double delta = 0.01;
        SeedFlags seed;
        void add(CLI::App* sub) {
            sub->add_option("--n", n, "number of samples");
            sub->add_option("--delta", delta, "path grid step");
            seed.add(sub);
        }
    };

    McFlags cov;
    double cov_L = 8.0;
    std::string cov_x = "0.5,1,2";
    {
        CLI::App* sub = command("mc-cov", "L E rho_L(0) rho_L(x) from periodic bridges (CSV x,value,std_error,n)");
        sub->add_option("--L", cov_L);
        sub->add_option("--x", cov_x, "comma-separated separations");
        cov.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"mc-cov", sub, ctx.common};
            action = [&] {
                const Seed s = cov.seed.get();
                const mc::CurveEstimate c =
                    mc::mc_rho_L_covariance(cov_L, parse_list(cov_x, "x"), cov.n, cov.delta, s, cov.seed.run());
                emit_curve(ctx, c);
                write_summary(ctx, curve_summary(c));
                return 0;
            };
        });
    }

    McFlags gi;
    double gi_M = 64.0;
    std::string gi_x = "1,2,4";
    {
        CLI::App* sub = command("mc-ginf", "g_inf from two-sided Bessel-3 paths (CSV x,value,std_error,n)");
        sub->add_option("--M", gi_M);
        sub->add_option("--x", gi_x, "comma-separated separations");
        gi.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"mc-ginf", sub, ctx.common};
            action = [&] {
                const Seed s = gi.seed.get();
                const mc::CurveEstimate c = mc::mc_g_infinity(parse_list(gi_x, "x"), gi_M, gi.n, gi.delta, s, gi.seed.run());
                emit_curve(ctx, c);
                write_summary(ctx, curve_summary(c));
                return 0;
            };
        });
    }

    McFlags mp;
    double mp_L = 64.0, mp_M = 4.0, mp_M_inf = 64.0;
    {
        CLI::App* sub = command("mc-profile",
                                "mean rho_L profile around its mode and the rho_inf counterpart "
                                "(CSV x,value,std_error,n,limit_value,limit_std_error)");
        sub->add_option("--L", mp_L);
        sub->add_option("--M", mp_M, "half-width of the profile window");
        sub->add_option("--M-inf", mp_M_inf, "truncation of the two-sided Bessel-3 paths");
        mp.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"mc-profile", sub, ctx.common};
            action = [&] {
                const Seed s = mp.seed.get();
                const mc::ModeProfile p = mc::mc_mode_profile(mp_L, mp_M, mp.n, mp.delta, s, mp_M_inf, mp.seed.run());
                CsvWriter w(ctx, {"x", "value", "std_error", "n", "limit_value", "limit_std_error"});
                for (std::size_t i = 0; i < p.bridge.xs.size(); ++i)
                    w.row({num(p.bridge.xs[i]), num(p.bridge.values[i]), num(p.bridge.std_errors[i]),
                           num(p.bridge.n_samples), num(p.limit.values[i]), num(p.limit.std_errors[i])});
                json j = curve_summary(p.bridge);
                j["limit"] = curve_summary(p.limit);
                write_summary(ctx, j);
                return 0;
            };
        });
    }

    CubatureFlags ft_cub;
    std::string ft_input;
    double ft_xlo = 20.0, ft_xhi = 80.0;
    int ft_points = 13;
    {
        CLI::App* sub = command("fit-tail",
                                "power-law fit of a curve; analytic g_inf on a geometric grid unless --input "
                                "(CSV x,value,std_error,n)");
        sub->add_option("--input", ft_input, "CSV with columns x,value[,std_error]");
        sub->add_option("--xlo", ft_xlo);
        sub->add_option("--xhi", ft_xhi);
        sub->add_option("--points", ft_points, "grid size for the analytic curve");
        ft_cub.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"fit-tail", sub, ctx.common};
            action = [&] {
                require(0.0 < ft_xlo && ft_xlo < ft_xhi, "fit-tail: need 0<xlo<xhi");
                mc::CurveEstimate c;
                std::vector<std::uint64_t> ns;
                if (ft_input.empty()) {
                    require(ft_points >= 4, "fit-tail: need points>=4");
                    const density::CubatureConfig& cfg = ft_cub.get();
                    for (int i = 0; i < ft_points; ++i) {
                        const double x = ft_xlo * std::pow(ft_xhi / ft_xlo, static_cast<double>(i) / (ft_points - 1));
                        const density::DensityPoint p = density::g_infinity(x, cfg);
                        c.xs.push_back(x);
                        c.values.push_back(p.value);
                        c.std_errors.push_back(p.est_error);
                        ns.push_back(0);
                    }
                } else {
                    std::ifstream in(ft_input);
                    if (!in) throw UsageError("cannot read " + ft_input);
                    std::string line;
                    int ix = -1, iv = -1, ie = -1, in_ = -1;
                    while (std::getline(in, line)) {
                        if (line.empty() || line[0] == '#') continue;
                        std::vector<std::string> cells;
                        std::stringstream ss(line);
                        std::string cell;
                        while (std::getline(ss, cell, ',')) cells.push_back(cell);
                        if (ix < 0) {
                            for (int k = 0; k < static_cast<int>(cells.size()); ++k) {
                                if (cells[k] == "x") ix = k;
                                if (cells[k] == "value") iv = k;
                                if (cells[k] == "std_error") ie = k;
                                if (cells[k] == "n") in_ = k;
                            }
                            if (ix < 0 || iv < 0) throw UsageError(ft_input + ": header must name x and value");
                            continue;
                        }
                        auto at = [&](int k) { return parse_list(cells.at(static_cast<std::size_t>(k)), "input")[0]; };
                        c.xs.push_back(at(ix));
                        c.values.push_back(at(iv));
                        c.std_errors.push_back(ie >= 0 ? at(ie) : 0.0);
                        ns.push_back(in_ >= 0 ? static_cast<std::uint64_t>(at(in_)) : 0);
                    }
                }
                const mc::TailFitResult r = mc::fit_tail(c, {ft_xlo, ft_xhi});
                CsvWriter w(ctx, {"x", "value", "std_error", "n"});
                for (std::size_t i = 0; i < c.xs.size(); ++i)
                    w.row({num(c.xs[i]), num(c.values[i]), num(c.std_errors[i]), num(ns[i])});
                write_summary(ctx, json{{"exponent", r.exponent},
                                        {"exponent_stderr", r.exponent_stderr},
                                        {"amplitude", r.amplitude},
                                        {"amplitude_stderr", r.amplitude_stderr},
                                        {"r_squared", r.r_squared},
                                        {"x_lo", r.x_lo},
                                        {"x_hi", r.x_hi},
                                        {"points", r.points}});
                return 0;
            };
        });
    }

    double po_t = 1.0, po_dx = 0.02, po_dt = 2e-4, po_hw = 0.0, po_xmax = 4.0;
    std::uint64_t po_n = 1000;
    bool po_zero = false;
    SeedFlags po_seed;
    {
        CLI::App* sub = command("polymer", "stochastic heat equation ensemble (CSV x,gbar,std_error)");
        sub->add_option("--t", po_t);
        sub->add_option("--dx", po_dx);
        sub->add_option("--dt", po_dt);
        sub->add_option("--n", po_n, "number of realizations");
        sub->add_option("--half-width", po_hw, "half-width of the grid, 0 = 6 sqrt(t) + 2");
        sub->add_option("--xmax", po_xmax, "gbar is reported on |x| <= xmax");
        sub->add_flag("--zero-noise", po_zero);
        po_seed.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"polymer", sub, ctx.common};
            action = [&] {
                const Seed s = po_seed.get();
                require(po_xmax > 0.0 && po_dx > 0.0, "polymer: need xmax>0 and dx>0");
                const double hw = po_hw > 0.0 ? po_hw : polymer::min_half_width(po_t);
                polymer::SheOptions opt;
                opt.zero_noise = po_zero;
                const auto fields = polymer::simulate_ensemble(po_t, po_dx, po_dt, hw, po_n, s, opt, po_seed.run());
                std::vector<double> xs;
                const auto k = static_cast<long>(std::floor(po_xmax / po_dx + 1e-9));
                for (long i = -k; i <= k; ++i) xs.push_back(static_cast<double>(i) * po_dx);
                const polymer::EllStatistics st = polymer::ell_statistics(fields, xs);
                const polymer::Estimate vq = polymer::annealed_variance(fields);
                CsvWriter w(ctx, {"x", "gbar", "std_error"});
                for (std::size_t i = 0; i < xs.size(); ++i)
                    w.row({num(xs[i]), num(st.gbar.values[i]), num(st.gbar.std_errors[i])});
                write_summary(ctx, json{{"EVq", vq.mean},
                                        {"EVq_se", vq.std_error},
                                        {"Eell2", st.ell2.mean},
                                        {"Eell2_se", st.ell2.std_error},
                                        {"n", vq.n}});
                return 0;
            };
        });
    }

    CubatureFlags vk_cub;
    {
        CLI::App* sub = command("validate-kernels",
                                "kernel identity table (CSV function,args,value,est_error,oracle,abs_diff)");
        vk_cub.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"validate-kernels", sub, ctx.common};
            action = [&] {
                emit_rows(ctx, cli::kernel_identity_suite(vk_cub.get()), false);
                return 0;
            };
        });
    }

    CubatureFlags va_cub;
    SeedFlags va_seed;
    {
        CLI::App* sub = command("validate", "kernel identities and Monte Carlo cross-checks; exit 1 on any failure");
        va_cub.add(sub);
        va_seed.add(sub);
        sub->callback([&, sub] {
            ctx = Context{"validate", sub, ctx.common};
            action = [&] {
                const density::CubatureConfig& cfg = va_cub.get();
                const Seed s = va_seed.get();
                std::vector<cli::CheckRow> rows = cli::kernel_identity_suite(cfg);
                const std::vector<cli::CheckRow> more = cli::cross_check_suite(cfg, s, va_seed.run());
                rows.insert(rows.end(), more.begin(), more.end());
                emit_rows(ctx, rows, true);
                int failed = 0;
                for (const auto& r : rows) failed += r.pass() ? 0 : 1;
                std::cerr << (failed == 0 ? "validate: all " + std::to_string(rows.size()) + " checks passed\n"
                                          : "validate: " + std::to_string(failed) + " of " +
                                                std::to_string(rows.size()) + " checks failed\n");
                return failed == 0 ? 0 : 1;
            };
        });
    }

    try {
        // splice config-file entries in right after the subcommand so that
        // later command-line flags override them
        std::vector<std::string> args(argv + 1, argv + argc);
        std::string config_path;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty() && !args.empty()) {
            const std::vector<std::string> extra = config_tokens(config_path);
            args.insert(args.begin() + 1, extra.begin(), extra.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        return action();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: precondition violated: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const DomainRestriction& e) {
        std::cerr << "error: precondition violated: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const NumericDegeneracy& e) {
        std::cerr << "error: numeric degeneracy: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: convergence failure: " << e.what() << " (partial " << num(e.partial_value())
                  << ", est_error " << num(e.est_error()) << ")\n";
        return kExitConvergence;
    }
}
